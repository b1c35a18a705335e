#pragma once

#include <functional>
#include <map>
#include <vector>

#include "ttms/reconstructor.hpp"
#include "ttms/scenario.hpp"

namespace testing {

using namespace ttms;

inline AppModel chain(const std::vector<Tick> &wcets) {
    AppModel am;
    for (std::size_t i = 0; i < wcets.size(); ++i) {
        Task t;
        t.id = static_cast<TaskId>(i);
        t.wcet = wcets[i];
        if (i > 0) t.predecessors.insert(static_cast<TaskId>(i - 1));
        am.tasks.emplace(t.id, t);
    }
    am.deadline = 1000;
    return am;
}

// T0 -> {T1, T2} -> T3
inline AppModel diamond(const std::vector<Tick> &w = {2, 3, 5, 1}) {
    AppModel am;
    for (TaskId i = 0; i < 4; ++i) am.tasks[i] = Task{i, w[static_cast<std::size_t>(i)], {}, {}, {}, {}};
    am.tasks[1].predecessors = {0};
    am.tasks[2].predecessors = {0};
    am.tasks[3].predecessors = {1, 2};
    am.deadline = 1000;
    return am;
}

inline Message message(MsgId id, TaskId tx, TaskId rx, Tick size) {
    Message m;
    m.id = id;
    m.tx_task = tx;
    m.rx_task = rx;
    m.size = size;
    return m;
}

// Five end systems with direct links ES1-ES2, ES1-ES3, ES2-ES4, ES3-ES5; tasks 1..5 of 10 ticks,
// task i pinned to ES i.
struct TableIv {
    AppModel am;
    PlatformModel pm;
    PriorityAssignment priorities;
};

inline TableIv table_iv() {
    TableIv s;
    for (TaskId t = 1; t <= 5; ++t) s.am.tasks[t] = Task{t, 10, {}, {}, {}, {}};
    s.am.messages[1] = message(1, 1, 2, 5);
    s.am.messages[2] = message(2, 1, 3, 10);
    s.am.messages[3] = message(3, 2, 4, 5);
    s.am.messages[4] = message(4, 3, 5, 5);
    s.am.deadline = 100;
    s.pm = PlatformModel::build(5, 0, {{0, 1}, {0, 2}, {1, 3}, {2, 4}});
    s.priorities.temporal = b_level(s.am);
    for (TaskId t = 1; t <= 5; ++t) s.priorities.spatial[t] = t - 1;
    return s;
}

inline PriorityAssignment heuristic(const AppModel &am, const PlatformModel &pm) {
    const HeuristicInference h;
    return infer_priorities(h, am, pm);
}

inline Schedule heuristic_schedule(const AppModel &am, const PlatformModel &pm) {
    return reconstruct(am, pm, heuristic(am, pm));
}

inline Scenario random_scenario(std::uint64_t seed, int tasks, int es, double density = 0.4) {
    ScenarioConfig cfg;
    cfg.n_tasks = tasks;
    cfg.n_end_systems = es;
    cfg.n_routers = 2;
    cfg.edge_density = density;
    cfg.seed = seed;
    return generate_scenario(cfg);
}

// Maximum sum of wcet along any path starting at each task, by explicit path enumeration.
inline std::map<TaskId, double> longest_path_oracle(const AppModel &am) {
    std::map<TaskId, std::vector<TaskId>> succ;
    for (const auto &[id, t] : am.tasks) {
        succ[id];
        for (TaskId p : t.predecessors) succ[p].push_back(id);
    }
    for (const auto &[id, m] : am.messages) succ[m.tx_task].push_back(m.rx_task);
    std::map<TaskId, double> best;
    for (const auto &[start, t] : am.tasks) {
        double top = 0;
        std::function<void(TaskId, double)> walk = [&](TaskId v, double acc) {
            acc += static_cast<double>(am.tasks.at(v).wcet);
            if (succ[v].empty()) top = std::max(top, acc);
            for (TaskId u : succ[v]) walk(u, acc);
        };
        walk(start, 0.0);
        best[start] = top;
    }
    return best;
}

} // namespace testing
