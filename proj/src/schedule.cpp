#include "ttms/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <tuple>

#include "ttms/errors.hpp"
#include "ttms/routing.hpp"

namespace ttms {

std::string to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::missing_entry: return "missing_entry";
    case ViolationKind::unknown_entry: return "unknown_entry";
    case ViolationKind::bad_duration: return "bad_duration";
    case ViolationKind::unavailable_hardware: return "unavailable_hardware";
    case ViolationKind::precedence: return "precedence";
    case ViolationKind::es_overlap: return "es_overlap";
    case ViolationKind::message_route: return "message_route";
    case ViolationKind::link_collision: return "link_collision";
    case ViolationKind::makespan: return "makespan";
    }
    return "unknown";
}

std::string to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::makespan: return "makespan";
    case ProfileKind::workload: return "workload";
    case ProfileKind::energy: return "energy";
    }
    return "unknown";
}

ProfileKind parse_profile_kind(const std::string &name) {
    if (name == "makespan") return ProfileKind::makespan;
    if (name == "workload") return ProfileKind::workload;
    if (name == "energy") return ProfileKind::energy;
    throw ConfigError("unknown profile '" + name + "'");
}

namespace {

std::string id(const char *what, long long v) { return std::string(what) + " " + std::to_string(v); }

bool node_ok(const PlatformModel &pm, HwId h) { return pm.contains(h) && pm.is_available(h); }

} // namespace

std::vector<Violation> safety_check(const Schedule &s, const AppModel &am, const PlatformModel &pm) {
    std::vector<Violation> out;
    auto report = [&out](ViolationKind k, std::string d) { out.push_back({k, std::move(d)}); };
    const Tick active = s.active_from;
    auto history = [active](Tick start) { return start < active; };

    for (const auto &[tid, t] : am.tasks)
        if (!s.tasks.contains(tid)) report(ViolationKind::missing_entry, id("task", tid));
    for (const auto &[mid, m] : am.messages)
        if (!s.messages.contains(mid)) report(ViolationKind::missing_entry, id("message", mid));

    Tick makespan = 0;
    std::map<HwId, std::vector<std::pair<TaskEntry, TaskId>>> per_es;
    for (const auto &[tid, e] : s.tasks) {
        makespan = std::max(makespan, e.end);
        if (!am.tasks.contains(tid)) {
            report(ViolationKind::unknown_entry, id("task", tid));
            continue;
        }
        if (!pm.is_end_system(e.es)) {
            report(ViolationKind::unavailable_hardware, id("task", tid) + " on non end system " + std::to_string(e.es));
            continue;
        }
        if (e.start < 0 || e.end <= e.start)
            report(ViolationKind::bad_duration, id("task", tid) + " has an empty or negative interval");
        if (!history(e.start)) {
            if (e.end - e.start != am.tasks.at(tid).wcet)
                report(ViolationKind::bad_duration, id("task", tid) + " duration differs from wcet");
            if (!pm.is_available(e.es))
                report(ViolationKind::unavailable_hardware, id("task", tid) + " on failed " + es_label(e.es));
        }
        per_es[e.es].push_back({e, tid});
    }
    for (auto &[es, entries] : per_es) {
        std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) {
            return std::tie(a.first.start, a.second) < std::tie(b.first.start, b.second);
        });
        for (std::size_t i = 1; i < entries.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (entries[j].first.end > entries[i].first.start)
                    report(ViolationKind::es_overlap, id("task", entries[j].second) + " overlaps " +
                                                          id("task", entries[i].second) + " on " + es_label(es));
    }

    std::optional<TaskGraph> graph;
    try {
        graph.emplace(am);
    } catch (const Error &e) {
        report(ViolationKind::precedence, e.what());
    }
    if (graph) {
        for (const auto &[tid, t] : am.tasks) {
            const auto rx = s.tasks.find(tid);
            if (rx == s.tasks.end()) continue;
            for (TaskId p : graph->predecessors(tid)) {
                const auto tx = s.tasks.find(p);
                if (tx == s.tasks.end()) continue;
                if (history(rx->second.start) && !history(tx->second.start)) continue;
                if (tx->second.end > rx->second.start)
                    report(ViolationKind::precedence, id("task", tid) + " starts before predecessor " + std::to_string(p) + " ends");
            }
        }
    }

    std::map<HwId, std::vector<std::pair<std::pair<Tick, Tick>, MsgId>>> per_link;
    for (const auto &[mid, e] : s.messages) {
        const auto mit = am.messages.find(mid);
        if (mit == am.messages.end()) {
            report(ViolationKind::unknown_entry, id("message", mid));
            continue;
        }
        const Message &m = mit->second;
        if (e.tx_task != m.tx_task || e.rx_task != m.rx_task) {
            report(ViolationKind::message_route, id("message", mid) + " endpoints differ from the application model");
            continue;
        }
        const auto tx = s.tasks.find(m.tx_task);
        const auto rx = s.tasks.find(m.rx_task);
        const bool skip = tx != s.tasks.end() && rx != s.tasks.end() && history(rx->second.start) &&
                          !history(tx->second.start);
        if (!skip && tx != s.tasks.end() && rx != s.tasks.end()) {
            if (e.tx_es != tx->second.es || e.rx_es != rx->second.es)
                report(ViolationKind::message_route, id("message", mid) + " end systems differ from task placement");
            if (e.start < tx->second.end)
                report(ViolationKind::precedence, id("message", mid) + " injected before its sender ends");
            if (e.end > rx->second.start)
                report(ViolationKind::precedence, id("message", mid) + " arrives after its receiver starts");
        }
        if (e.tx_es == e.rx_es) {
            if (!e.route.empty() || e.end != e.start)
                report(ViolationKind::message_route, id("message", mid) + " co-located but routed");
            continue;
        }
        if (e.route.empty()) {
            report(ViolationKind::message_route, id("message", mid) + " lacks a route");
            continue;
        }
        std::vector<HwId> nodes;
        try {
            nodes = route_nodes(pm, e.tx_es, e.route);
        } catch (const Error &err) {
            report(ViolationKind::message_route, id("message", mid) + ": " + err.what());
            continue;
        }
        if (nodes.back() != e.rx_es)
            report(ViolationKind::message_route, id("message", mid) + " route does not reach its receiver");
        if (e.end - e.start != m.size * static_cast<Tick>(e.route.size()))
            report(ViolationKind::bad_duration, id("message", mid) + " duration differs from size x hops");
        if (!history(e.start)) {
            bool ok = std::all_of(nodes.begin(), nodes.end(), [&](HwId n) { return node_ok(pm, n); }) &&
                      std::all_of(e.route.begin(), e.route.end(), [&](HwId l) { return node_ok(pm, l); });
            if (!ok) report(ViolationKind::unavailable_hardware, id("message", mid) + " routed over failed hardware");
        }
        for (std::size_t k = 0; k < e.route.size(); ++k) {
            const Tick lo = e.start + static_cast<Tick>(k) * m.size;
            per_link[e.route[k]].push_back({{lo, lo + m.size}, mid});
        }
    }
    for (auto &[link, slots] : per_link) {
        std::sort(slots.begin(), slots.end());
        for (std::size_t i = 1; i < slots.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (slots[j].first.second > slots[i].first.first)
                    report(ViolationKind::link_collision, id("message", slots[j].second) + " collides with " +
                                                              id("message", slots[i].second) + " on link " +
                                                              std::to_string(link));
    }
    if (makespan != s.makespan) report(ViolationKind::makespan, "makespan " + std::to_string(s.makespan) + " != " + std::to_string(makespan));
    return out;
}

std::map<HwId, Tick> busy_times(const Schedule &s) {
    std::map<HwId, Tick> busy;
    for (HwId e : s.end_systems) busy[e] = 0;
    for (const auto &[tid, e] : s.tasks) {
        const auto it = busy.find(e.es);
        if (it != busy.end()) it->second += e.end - e.start;
    }
    return busy;
}

EvaluationReport evaluate_unchecked(const Schedule &s, const EvaluationProfile &profile) {
    EvaluationReport r;
    r.makespan = s.makespan;
    r.deadline_met = s.makespan <= profile.deadline;
    r.busy = busy_times(s);
    switch (profile.kind) {
    case ProfileKind::makespan: r.metric = static_cast<double>(s.makespan); break;
    case ProfileKind::workload: {
        if (r.busy.empty()) break;
        double mean = 0.0;
        for (const auto &[e, b] : r.busy) mean += static_cast<double>(b);
        mean /= static_cast<double>(r.busy.size());
        double var = 0.0;
        for (const auto &[e, b] : r.busy) var += (static_cast<double>(b) - mean) * (static_cast<double>(b) - mean);
        r.metric = std::sqrt(var / static_cast<double>(r.busy.size()));
        break;
    }
    case ProfileKind::energy: {
        double total = 0.0;
        for (const auto &[tid, e] : s.tasks) total += static_cast<double>(e.end - e.start);
        r.metric = total * s.power_factor;
        break;
    }
    }
    r.reward = -r.metric;
    return r;
}

EvaluationReport evaluate(const Schedule &s, const AppModel &am, const PlatformModel &pm,
                          const EvaluationProfile &profile) {
    const auto violations = safety_check(s, am, pm);
    if (!violations.empty())
        throw UnsafeScheduleError("schedule has " + std::to_string(violations.size()) +
                                  " violations, first: " + violations.front().detail);
    return evaluate_unchecked(s, profile);
}

double penalty_reward(const EvaluationProfile &profile) { return -10.0 * static_cast<double>(profile.deadline); }

std::string es_label(HwId es) { return "ES" + std::to_string(es + 1); }

std::string message_table_csv(const Schedule &s) {
    std::ostringstream out;
    out << "Message ID,Tx Task,Rx Task,Tx End System,Rx End System,Start Time,End Time\n";
    for (const auto &[mid, e] : s.messages)
        out << mid << ',' << e.tx_task << ',' << e.rx_task << ',' << es_label(e.tx_es) << ',' << es_label(e.rx_es)
            << ',' << e.start << ',' << e.end << '\n';
    return out.str();
}

std::string task_table_csv(const Schedule &s, const AppModel &am) {
    std::ostringstream out;
    out << "task_id,runs_on,start_time,end_time,wcet\n";
    for (const auto &[tid, e] : s.tasks) {
        const auto it = am.tasks.find(tid);
        out << tid << ',' << es_label(e.es) << ',' << e.start << ',' << e.end << ','
            << (it == am.tasks.end() ? 0 : it->second.wcet) << '\n';
    }
    return out.str();
}

} // namespace ttms
