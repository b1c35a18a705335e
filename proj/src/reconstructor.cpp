#include "ttms/reconstructor.hpp"

#include <algorithm>
#include <set>

#include "ttms/errors.hpp"
#include "ttms/recovery.hpp"

namespace ttms {

namespace {

bool route_available(const PlatformModel &pm, const MessageEntry &m) {
    if (!pm.contains(m.tx_es) || !pm.is_available(m.tx_es) || !pm.contains(m.rx_es) || !pm.is_available(m.rx_es))
        return false;
    try {
        for (HwId n : route_nodes(pm, m.tx_es, m.route))
            if (!pm.is_available(n)) return false;
    } catch (const Error &) {
        return false;
    }
    return std::all_of(m.route.begin(), m.route.end(), [&](HwId l) { return pm.is_available(l); });
}

struct Outbound {
    TaskId tx;
    TaskId rx;
};

FrozenPrefix freeze(Tick t, const std::map<TaskId, TaskEntry> &started_tasks,
                    const std::map<MsgId, MessageEntry> &started_messages, const std::vector<TaskId> &universe,
                    const std::vector<Outbound> &edges, const PlatformModel *pm) {
    FrozenPrefix prefix;
    prefix.event_time = t;
    auto available = [pm](HwId h) { return pm == nullptr || (pm->contains(h) && pm->is_available(h)); };

    for (const auto &[tid, e] : started_tasks)
        if (e.end <= t || available(e.es)) prefix.tasks.emplace(tid, e);

    // A completed task on failed hardware has lost its output; re-run it if a pending task needs it.
    bool changed = pm != nullptr;
    while (changed) {
        changed = false;
        for (const auto &edge : edges) {
            const auto it = prefix.tasks.find(edge.tx);
            if (it == prefix.tasks.end() || available(it->second.es) || prefix.tasks.contains(edge.rx)) continue;
            prefix.tasks.erase(it);
            changed = true;
        }
    }

    for (const auto &[mid, m] : started_messages) {
        if (prefix.tasks.contains(m.rx_task)) {
            prefix.messages.emplace(mid, m);
        } else if (prefix.tasks.contains(m.tx_task) && (pm == nullptr || route_available(*pm, m))) {
            prefix.in_flight.emplace(mid, m);
        }
    }
    for (TaskId tid : universe)
        if (!prefix.tasks.contains(tid)) prefix.pending.insert(tid);
    return prefix;
}

std::vector<Outbound> message_edges(const AppModel &am) {
    std::vector<Outbound> edges;
    for (const auto &[mid, m] : am.messages) edges.push_back({m.tx_task, m.rx_task});
    return edges;
}

template <typename Map>
std::pair<std::map<TaskId, TaskEntry>, std::map<MsgId, MessageEntry>> started_entries(const Map &tasks,
                                                                                      const std::map<MsgId, MessageEntry> &msgs,
                                                                                      Tick t) {
    std::map<TaskId, TaskEntry> st;
    std::map<MsgId, MessageEntry> sm;
    for (const auto &[tid, e] : tasks)
        if (started_by(e.start, e.end, t)) st.emplace(tid, e);
    for (const auto &[mid, m] : msgs)
        if (started_by(m.start, m.end, t)) sm.emplace(mid, m);
    return {std::move(st), std::move(sm)};
}

} // namespace

FrozenPrefix fix_past(const Schedule &previous, Tick event_time) {
    auto [st, sm] = started_entries(previous.tasks, previous.messages, event_time);
    std::vector<TaskId> universe;
    for (const auto &[tid, e] : previous.tasks) universe.push_back(tid);
    return freeze(event_time, st, sm, universe, {}, nullptr);
}

FrozenPrefix fix_past(const Schedule &previous, Tick event_time, const AppModel &am, const PlatformModel &pm) {
    auto [st, sm] = started_entries(previous.tasks, previous.messages, event_time);
    std::vector<TaskId> universe;
    for (const auto &[tid, t] : am.tasks) universe.push_back(tid);
    return freeze(event_time, st, sm, universe, message_edges(am), &pm);
}

FrozenPrefix fix_past(const RecoverySnapshot &snapshot, const AppModel &am, const PlatformModel &pm) {
    std::vector<TaskId> universe;
    for (const auto &[tid, t] : am.tasks) universe.push_back(tid);
    return freeze(snapshot.tick, snapshot.tasks, snapshot.messages, universe, message_edges(am), &pm);
}

MessageEntry allocate_message(const Message &m, const TaskEntry &tx, HwId rx_es, Tick lower_bound,
                              const Router &router, LinkOccupancy &occupancy) {
    MessageEntry entry{m.tx_task, m.rx_task, tx.es, rx_es, {}, 0, 0};
    const Tick earliest = std::max(tx.end, lower_bound);
    if (tx.es == rx_es) {
        entry.start = entry.end = earliest;
        return entry;
    }
    auto route = router.route(tx.es, rx_es);
    if (!route)
        throw NoRouteError("no route from " + es_label(tx.es) + " to " + es_label(rx_es) + " for message " +
                           std::to_string(m.id));
    entry.route = std::move(*route);
    entry.start = occupancy.earliest_start(entry.route, m.size, earliest);
    entry.end = entry.start + m.size * static_cast<Tick>(entry.route.size());
    occupancy.reserve(entry.route, m.size, entry.start, m.id);
    return entry;
}

namespace {

void reserve_existing(LinkOccupancy &occ, MsgId mid, const MessageEntry &m) {
    if (m.route.empty()) return;
    occ.reserve(m.route, (m.end - m.start) / static_cast<Tick>(m.route.size()), m.start, mid);
}

} // namespace

std::map<MsgId, MessageEntry> allocate_messages(const Schedule &partial, const AppModel &am, const PlatformModel &pm,
                                                Tick lower_bound) {
    const Router router(pm);
    LinkOccupancy occ;
    for (const auto &[mid, m] : partial.messages) reserve_existing(occ, mid, m);
    std::map<MsgId, MessageEntry> out;
    for (const auto &[mid, m] : am.messages) {
        if (partial.messages.contains(mid)) continue;
        const auto tx = partial.tasks.find(m.tx_task);
        const auto rx = partial.tasks.find(m.rx_task);
        if (tx == partial.tasks.end() || rx == partial.tasks.end()) continue;
        out.emplace(mid, allocate_message(m, tx->second, rx->second.es, lower_bound, router, occ));
    }
    return out;
}

Schedule reconstruct(const AppModel &am, const PlatformModel &pm, const PriorityAssignment &priorities,
                     const FrozenPrefix &prefix, const ReconstructOptions &options) {
    const TaskGraph graph(am);
    Schedule s;
    s.active_from = prefix.event_time;
    s.power_factor = pm.frequency_scale;
    s.end_systems = pm.end_systems(true);
    const Tick lower_bound = prefix.event_time + (prefix.event_time > 0 ? options.recovery_delay : 0);

    for (const auto &[tid, e] : prefix.tasks)
        if (am.tasks.contains(tid)) s.tasks.emplace(tid, e);

    std::vector<TaskId> pending;
    for (const auto &[tid, t] : am.tasks) {
        if (s.tasks.contains(tid)) continue;
        pending.push_back(tid);
        const auto sp = priorities.spatial.find(tid);
        if (sp == priorities.spatial.end() || !priorities.temporal.contains(tid))
            throw InvalidInferenceError("no priorities for pending task " + std::to_string(tid));
        if (!pm.is_end_system(sp->second) || !pm.is_available(sp->second))
            throw InfeasibleScheduleError("task " + std::to_string(tid) + " targets unavailable end system " +
                                          std::to_string(sp->second));
    }

    for (const auto &[mid, m] : prefix.messages)
        if (am.messages.contains(mid) && s.tasks.contains(m.rx_task)) s.messages.emplace(mid, m);
    for (const auto &[mid, m] : prefix.in_flight) {
        if (!am.messages.contains(mid) || s.tasks.contains(m.rx_task)) continue;
        const auto tx = s.tasks.find(m.tx_task);
        if (tx == s.tasks.end() || tx->second.es != m.tx_es) continue;
        if (priorities.spatial.at(m.rx_task) == m.rx_es) s.messages.emplace(mid, m);
    }

    const Router router(pm);
    LinkOccupancy occ;
    for (const auto &[mid, m] : s.messages) reserve_existing(occ, mid, m);
    std::map<HwId, Tick> front;
    for (const auto &[tid, e] : s.tasks) front[e.es] = std::max(front[e.es], e.end);

    auto before = [&priorities](TaskId a, TaskId b) {
        const double pa = priorities.temporal.at(a), pb = priorities.temporal.at(b);
        return pa != pb ? pa > pb : a < b;
    };
    std::set<TaskId, decltype(before)> ready(before);
    std::map<TaskId, std::size_t> waiting;
    for (TaskId tid : pending) {
        std::size_t n = 0;
        for (TaskId p : graph.predecessors(tid))
            if (!s.tasks.contains(p)) ++n;
        waiting[tid] = n;
        if (n == 0) ready.insert(tid);
    }

    while (!ready.empty()) {
        const TaskId tid = *ready.begin();
        ready.erase(ready.begin());
        const HwId es = priorities.spatial.at(tid);
        Tick start = std::max(lower_bound, front[es]);
        for (TaskId p : graph.predecessors(tid)) start = std::max(start, s.tasks.at(p).end);
        for (MsgId mid : graph.inbound(tid)) {
            auto it = s.messages.find(mid);
            if (it == s.messages.end()) {
                const Message &m = am.messages.at(mid);
                it = s.messages.emplace(mid, allocate_message(m, s.tasks.at(m.tx_task), es, lower_bound, router, occ)).first;
            }
            start = std::max(start, it->second.end);
        }
        const Tick end = start + am.tasks.at(tid).wcet;
        s.tasks.emplace(tid, TaskEntry{es, start, end});
        front[es] = end;
        for (TaskId succ : graph.successors(tid)) {
            auto w = waiting.find(succ);
            if (w != waiting.end() && --w->second == 0) ready.insert(succ);
        }
    }
    if (s.tasks.size() != am.tasks.size())
        throw InfeasibleScheduleError("pending tasks depend on tasks that cannot be placed");

    for (const auto &[tid, e] : s.tasks) s.makespan = std::max(s.makespan, e.end);
    return s;
}

Schedule reconstruct(const AppModel &am, const PlatformModel &pm, const PriorityAssignment &priorities,
                     Tick event_time, const RecoverySnapshot *recovery, const ReconstructOptions &options) {
    if (recovery == nullptr) {
        FrozenPrefix prefix;
        prefix.event_time = event_time;
        for (const auto &[tid, t] : am.tasks) prefix.pending.insert(tid);
        return reconstruct(am, pm, priorities, prefix, options);
    }
    if (recovery->tick != event_time)
        throw OutOfRangeError("recovery snapshot is for tick " + std::to_string(recovery->tick) + ", not " +
                              std::to_string(event_time));
    return reconstruct(am, pm, priorities, fix_past(*recovery, am, pm), options);
}

} // namespace ttms
