#include "doctest.h"

#include <algorithm>

#include "support.hpp"
#include "ttms/errors.hpp"
#include "ttms/recovery.hpp"

using namespace ttms;
using testing::chain;

namespace {

PlatformModel single_es() { return PlatformModel::build(1, 0, {}); }

PriorityAssignment on_es(const AppModel &am, HwId es) {
    PriorityAssignment p;
    p.temporal = b_level(am);
    for (const auto &[id, t] : am.tasks) p.spatial[id] = es;
    return p;
}

struct Hop {
    HwId link;
    Tick start, end;
    MsgId msg;
};

// Every per-hop link interval of a schedule, computed from the entries alone.
std::vector<Hop> hops(const Schedule &s) {
    std::vector<Hop> out;
    for (const auto &[mid, m] : s.messages) {
        if (m.route.empty()) continue;
        const Tick d = (m.end - m.start) / static_cast<Tick>(m.route.size());
        for (std::size_t k = 0; k < m.route.size(); ++k)
            out.push_back({m.route[k], m.start + static_cast<Tick>(k) * d, m.start + static_cast<Tick>(k + 1) * d, mid});
    }
    return out;
}

bool intervals_disjoint(const Schedule &s) {
    const auto h = hops(s);
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = i + 1; j < h.size(); ++j)
            if (h[i].link == h[j].link && std::max(h[i].start, h[j].start) < std::min(h[i].end, h[j].end)) return false;
    return true;
}

ContextEvent failure_at(HwId es, Tick t) {
    return {ContextKind::failure, 0, 0, static_cast<std::uint16_t>(t), static_cast<std::uint8_t>(es)};
}

} // namespace

TEST_CASE("empty application gives an empty schedule") {
    AppModel am;
    const Schedule s = reconstruct(am, single_es(), PriorityAssignment{});
    CHECK(s.tasks.empty());
    CHECK(s.messages.empty());
    CHECK(s.makespan == 0);
}

TEST_CASE("chain on one end system") {
    const AppModel am = chain({3, 2, 4});
    const Schedule s = reconstruct(am, single_es(), on_es(am, 0));
    CHECK(s.tasks.at(0) == TaskEntry{0, 0, 3});
    CHECK(s.tasks.at(1) == TaskEntry{0, 3, 5});
    CHECK(s.tasks.at(2) == TaskEntry{0, 5, 9});
    CHECK(s.makespan == 9);
}

TEST_CASE("single end system serialises tasks in priority order") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto sc = testing::random_scenario(seed, 8, 1, 0.3);
        const auto p = on_es(sc.am, 0);
        const Schedule s = reconstruct(sc.am, sc.pm, p);
        // Oracle: repeatedly run the highest-priority task whose predecessors are all done.
        const TaskGraph g(sc.am);
        std::set<TaskId> done;
        Tick t = 0;
        std::map<TaskId, Tick> start;
        while (done.size() < sc.am.tasks.size()) {
            TaskId pick = -1;
            for (TaskId id : priority_order(p.temporal)) {
                if (done.contains(id)) continue;
                const auto &pr = g.predecessors(id);
                if (std::all_of(pr.begin(), pr.end(), [&](TaskId q) { return done.contains(q); })) {
                    pick = id;
                    break;
                }
            }
            REQUIRE(pick >= 0);
            start[pick] = t;
            t += sc.am.tasks.at(pick).wcet;
            done.insert(pick);
        }
        for (const auto &[id, st] : start) CHECK(s.tasks.at(id).start == st);
        CHECK(s.makespan == t);
    }
}

TEST_CASE("worked message timetable") {
    const auto f = testing::table_iv();
    const Schedule s = reconstruct(f.am, f.pm, f.priorities);
    const auto &m = s.messages;
    CHECK(m.at(1).tx_es == 0);
    CHECK(m.at(1).rx_es == 1);
    CHECK(m.at(1).start == 10);
    CHECK(m.at(1).end == 15);
    CHECK(m.at(2).start == 10);
    CHECK(m.at(2).end == 20);
    CHECK(m.at(3).start == 25);
    CHECK(m.at(3).end == 30);
    CHECK(m.at(4).start == 30);
    CHECK(m.at(4).end == 35);
    CHECK(s.makespan == 45);
    CHECK(safety_check(s, f.am, f.pm).empty());

    const std::string csv = message_table_csv(s);
    CHECK(csv.rfind("Message ID,Tx Task,Rx Task,Tx End System,Rx End System,Start Time,End Time\n", 0) == 0);
    CHECK(csv.find("1,1,2,ES1,ES2,10,15\n") != std::string::npos);
    CHECK(csv.find("2,1,3,ES1,ES3,10,20\n") != std::string::npos);
    CHECK(csv.find("3,2,4,ES2,ES4,25,30\n") != std::string::npos);
    CHECK(csv.find("4,3,5,ES3,ES5,30,35\n") != std::string::npos);
}

TEST_CASE("co-located messages are delivered instantly") {
    AppModel am = chain({4});
    am.tasks[1] = Task{1, 2, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 1, 7);
    const Schedule s = reconstruct(am, single_es(), on_es(am, 0));
    CHECK(s.messages.at(0).start == 4);
    CHECK(s.messages.at(0).end == 4);
    CHECK(s.messages.at(0).route.empty());
    CHECK(s.tasks.at(1).start == 4);
}

TEST_CASE("contending messages share a link first-fit") {
    AppModel am;
    am.tasks[0] = Task{0, 10, {}, {}, {}, {}};
    am.tasks[1] = Task{1, 1, {}, {}, {}, {}};
    am.tasks[2] = Task{2, 1, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 1, 5);
    am.messages[1] = testing::message(1, 0, 2, 5);
    am.deadline = 100;
    const PlatformModel pm = PlatformModel::build(2, 0, {{0, 1}});
    PriorityAssignment p{b_level(am), {{0, 0}, {1, 1}, {2, 1}}};
    const Schedule s = reconstruct(am, pm, p);
    CHECK(s.messages.at(0).start == 10);
    CHECK(s.messages.at(0).end == 15);
    CHECK(s.messages.at(1).start == 15);
    CHECK(s.messages.at(1).end == 20);
    CHECK(intervals_disjoint(s));
}

TEST_CASE("multi-hop messages are store-and-forward") {
    AppModel am = chain({2});
    am.tasks[1] = Task{1, 1, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 1, 3);
    // ES0 - R - ES1: two hops.
    const PlatformModel pm = PlatformModel::build(2, 1, {{0, 2}, {1, 2}});
    const Schedule s = reconstruct(am, pm, PriorityAssignment{b_level(am), {{0, 0}, {1, 1}}});
    CHECK(s.messages.at(0).route.size() == 2);
    CHECK(s.messages.at(0).start == 2);
    CHECK(s.messages.at(0).end == 8);
    CHECK(s.tasks.at(1).start == 8);
}

TEST_CASE("unreachable receivers raise no-route errors") {
    AppModel am = chain({2});
    am.tasks[1] = Task{1, 1, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 1, 3);
    const PlatformModel pm = PlatformModel::build(2, 0, {});
    CHECK_THROWS_AS(reconstruct(am, pm, PriorityAssignment{b_level(am), {{0, 0}, {1, 1}}}), NoRouteError);
}

TEST_CASE("placement on failed end systems is infeasible") {
    const AppModel am = chain({1, 1});
    PlatformModel pm = PlatformModel::build(2, 1, {{0, 2}, {1, 2}});
    pm.units[1].available = false;
    CHECK_THROWS_AS(reconstruct(am, pm, on_es(am, 1)), InfeasibleScheduleError);
    PriorityAssignment missing = on_es(am, 0);
    missing.spatial.erase(1);
    CHECK_THROWS_AS(reconstruct(am, pm, missing), InvalidInferenceError);
}

TEST_CASE("safety check reports constructed violations") {
    const AppModel am = chain({3, 2});
    const PlatformModel pm = single_es();
    Schedule s = reconstruct(am, pm, on_es(am, 0));
    CHECK(safety_check(s, am, pm).empty());

    Schedule early = s;
    early.tasks[1] = TaskEntry{0, 2, 4};
    const auto v = safety_check(early, am, pm);
    CHECK(std::count_if(v.begin(), v.end(), [](const Violation &x) { return x.kind == ViolationKind::precedence; }) == 1);

    Schedule wrong = s;
    wrong.tasks[1].end = 9;
    CHECK(!safety_check(wrong, am, pm).empty());

    AppModel two;
    two.tasks[0] = Task{0, 3, {}, {}, {}, {}};
    two.tasks[1] = Task{1, 3, {}, {}, {}, {}};
    Schedule overlap;
    overlap.tasks[0] = TaskEntry{0, 0, 3};
    overlap.tasks[1] = TaskEntry{0, 2, 5};
    overlap.makespan = 5;
    overlap.end_systems = {0};
    const auto o = safety_check(overlap, two, pm);
    CHECK(std::count_if(o.begin(), o.end(), [](const Violation &x) { return x.kind == ViolationKind::es_overlap; }) == 1);
}

TEST_CASE("overlapping messages on one link give one collision") {
    AppModel am;
    am.tasks[0] = Task{0, 10, {}, {}, {}, {}};
    am.tasks[1] = Task{1, 1, {}, {}, {}, {}};
    am.tasks[2] = Task{2, 1, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 1, 5);
    am.messages[1] = testing::message(1, 0, 2, 5);
    am.deadline = 100;
    const PlatformModel pm = PlatformModel::build(2, 0, {{0, 1}});
    Schedule s = reconstruct(am, pm, PriorityAssignment{b_level(am), {{0, 0}, {1, 1}, {2, 1}}});
    s.messages[1].start = 12;
    s.messages[1].end = 17;
    s.tasks[2] = TaskEntry{1, 17, 18};
    s.tasks[1] = TaskEntry{1, 15, 16};
    s.makespan = 18;
    CHECK(!intervals_disjoint(s));
    const auto v = safety_check(s, am, pm);
    CHECK(std::count_if(v.begin(), v.end(), [](const Violation &x) { return x.kind == ViolationKind::link_collision; }) == 1);
    // Tasks 1 and 2 still overlap-free on ES2, so that is the only violation besides none.
    CHECK(std::count_if(v.begin(), v.end(), [](const Violation &x) { return x.kind == ViolationKind::es_overlap; }) == 0);
}

TEST_CASE("evaluation profiles") {
    Schedule s;
    s.tasks[0] = TaskEntry{0, 0, 15};
    s.tasks[1] = TaskEntry{1, 20, 30};
    s.tasks[2] = TaskEntry{2, 25, 35};
    s.end_systems = {0, 1, 2};
    s.makespan = 35;
    auto r = evaluate_unchecked(s, {ProfileKind::makespan, 35});
    CHECK(r.metric == 35.0);
    CHECK(r.reward == -35.0);
    CHECK(r.deadline_met);
    CHECK(!evaluate_unchecked(s, {ProfileKind::makespan, 34}).deadline_met);

    Schedule even;
    for (TaskId i = 0; i < 3; ++i) even.tasks[i] = TaskEntry{i, 0, 10};
    even.end_systems = {0, 1, 2};
    even.makespan = 10;
    CHECK(evaluate_unchecked(even, {ProfileKind::workload, 10}).metric == 0.0);

    Schedule energy;
    for (TaskId i = 0; i < 3; ++i) energy.tasks[i] = TaskEntry{0, 2 * i, 2 * i + 2};
    energy.end_systems = {0};
    energy.makespan = 6;
    CHECK(evaluate_unchecked(energy, {ProfileKind::energy, 10}).metric == 6.0);
    energy.power_factor = 0.5;
    CHECK(evaluate_unchecked(energy, {ProfileKind::energy, 10}).metric == 3.0);

    // busy {10, 0}: population std-dev 5.
    Schedule skew;
    skew.tasks[0] = TaskEntry{0, 0, 10};
    skew.end_systems = {0, 1};
    skew.makespan = 10;
    CHECK(evaluate_unchecked(skew, {ProfileKind::workload, 10}).metric == doctest::Approx(5.0));
    CHECK(penalty_reward({ProfileKind::makespan, 40}) == -400.0);
}

TEST_CASE("evaluate refuses unsafe schedules") {
    const AppModel am = chain({3, 2});
    Schedule s = reconstruct(am, single_es(), on_es(am, 0));
    s.tasks[1] = TaskEntry{0, 1, 3};
    CHECK_THROWS_AS(evaluate(s, am, single_es(), {ProfileKind::makespan, 10}), UnsafeScheduleError);
}

TEST_CASE("fix past boundaries") {
    const auto sc = testing::random_scenario(3, 10, 3);
    const Schedule s = testing::heuristic_schedule(sc.am, sc.pm);
    const auto all = fix_past(s, s.makespan);
    CHECK(all.pending.empty());
    CHECK(all.tasks.size() == sc.am.tasks.size());
    const auto none = fix_past(s, 0);
    CHECK(none.tasks.empty());
    CHECK(none.pending.size() == sc.am.tasks.size());
}

TEST_CASE("randomised reconstruction properties") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const int n = 3 + static_cast<int>(seed % 18);
        const int es = 1 + static_cast<int>(seed % 5);
        const auto sc = testing::random_scenario(seed, n, es);
        const auto p = testing::heuristic(sc.am, sc.pm);
        const Schedule s = reconstruct(sc.am, sc.pm, p);
        CHECK(safety_check(s, sc.am, sc.pm).empty());
        CHECK(intervals_disjoint(s));
        CHECK(reconstruct(sc.am, sc.pm, p) == s);
        Tick top = 0;
        for (const auto &[id, e] : s.tasks) top = std::max(top, e.end);
        CHECK(s.makespan == top);

        for (Tick t : {Tick{1}, s.makespan / 3, s.makespan / 2, s.makespan - 1}) {
            const auto prefix = fix_past(s, t, sc.am, sc.pm);
            std::set<TaskId> seen(prefix.pending);
            for (const auto &[id, e] : prefix.tasks) {
                CHECK(!prefix.pending.contains(id));
                seen.insert(id);
            }
            CHECK(seen.size() == sc.am.tasks.size());
            const Schedule again = reconstruct(sc.am, sc.pm, p, prefix);
            CHECK(safety_check(again, sc.am, sc.pm).empty());
            for (const auto &[id, e] : prefix.tasks) CHECK(again.tasks.at(id) == e);
            // Nothing changed, so list scheduling resumes into the same timetable.
            CHECK(again == s);
        }
    }
}

TEST_CASE("failure recovery keeps the past and avoids failed hardware") {
    int exercised = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto sc = testing::random_scenario(seed, 12, 3 + static_cast<int>(seed % 3));
        const Schedule s = testing::heuristic_schedule(sc.am, sc.pm);
        const HwId victim = s.tasks.rbegin()->second.es;
        const Tick t = std::max<Tick>(1, s.makespan / 2);
        const PlatformModel pm2 = apply_failure(sc.pm, failure_at(victim, t));
        if (!platform_connected(pm2)) continue;
        const auto prefix = fix_past(s, t, sc.am, pm2);
        const auto p = testing::heuristic(sc.am, pm2);
        const Schedule r = reconstruct(sc.am, pm2, p, prefix);
        ++exercised;
        CHECK(safety_check(r, sc.am, pm2).empty());
        for (const auto &[id, e] : prefix.tasks) CHECK(r.tasks.at(id) == e);
        for (const auto &[id, e] : r.tasks)
            if (e.start >= t) CHECK(e.es != victim);
        for (const auto &[id, m] : r.messages) {
            if (m.start < t) continue;
            CHECK(m.tx_es != victim);
            CHECK(m.rx_es != victim);
        }
        for (const auto &[id, e] : s.tasks)
            if (e.end <= t && e.es != victim) CHECK(r.tasks.at(id) == e);

        const RecoverySnapshot snap = take_snapshot(s, t);
        CHECK(reconstruct(sc.am, pm2, p, t, &snap) == r);
        const RecoveryLog log(s);
        CHECK(log.restore(t) == snap);
    }
    CHECK(exercised >= 20);
}

TEST_CASE("recovery delay postpones pending work") {
    const auto sc = testing::random_scenario(5, 10, 3);
    const Schedule s = testing::heuristic_schedule(sc.am, sc.pm);
    const Tick t = s.makespan / 2;
    const auto prefix = fix_past(s, t, sc.am, sc.pm);
    const Schedule r = reconstruct(sc.am, sc.pm, testing::heuristic(sc.am, sc.pm), prefix, ReconstructOptions{4});
    for (TaskId id : prefix.pending) CHECK(r.tasks.at(id).start >= t + 4);
    CHECK(safety_check(r, sc.am, sc.pm).empty());
}

TEST_CASE("snapshot log") {
    const auto sc = testing::random_scenario(9, 10, 3);
    const Schedule s = testing::heuristic_schedule(sc.am, sc.pm);
    const RecoveryLog log(s);
    CHECK(log.horizon() == s.makespan);
    const auto zero = log.restore(0);
    CHECK(zero.tasks.empty());
    CHECK(zero.completed.empty());
    for (Tick t = 0; t <= s.makespan; ++t) {
        const auto snap = log.restore(t);
        CHECK(snap == take_snapshot(s, t));
        for (TaskId id : snap.completed) CHECK(s.tasks.at(id).end <= t);
        for (const auto &[id, e] : snap.tasks) CHECK(started_by(e.start, e.end, t));
    }
    CHECK_THROWS_AS(log.restore(-1), OutOfRangeError);
    CHECK_THROWS_AS(log.restore(s.makespan + 1), OutOfRangeError);
    // Resuming at any tick without an event reproduces the original run.
    const auto p = testing::heuristic(sc.am, sc.pm);
    for (Tick t : {Tick{0}, s.makespan / 2, s.makespan}) {
        const auto snap = log.restore(t);
        CHECK(reconstruct(sc.am, sc.pm, p, t, &snap) == s);
    }
    const auto snap = log.restore(3);
    CHECK_THROWS_AS(reconstruct(sc.am, sc.pm, p, 4, &snap), OutOfRangeError);
}
