#include "ttms/priorities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttms/errors.hpp"

namespace ttms {

std::map<TaskId, double> b_level(const AppModel &am) {
    const TaskGraph graph(am);
    std::map<TaskId, double> level;
    const auto &order = graph.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        double best = 0.0;
        for (TaskId s : graph.successors(*it)) best = std::max(best, level.at(s));
        level[*it] = static_cast<double>(am.tasks.at(*it).wcet) + best;
    }
    return level;
}

std::vector<TaskId> priority_order(const std::map<TaskId, double> &temporal) {
    std::vector<TaskId> ids;
    ids.reserve(temporal.size());
    for (const auto &[id, p] : temporal) ids.push_back(id);
    std::stable_sort(ids.begin(), ids.end(),
                     [&](TaskId a, TaskId b) { return temporal.at(a) > temporal.at(b); });
    return ids;
}

std::map<TaskId, HwId> least_loaded_allocation(const AppModel &am, const PlatformModel &pm,
                                               const std::map<TaskId, double> &temporal,
                                               std::map<HwId, Tick> current_loads) {
    const auto es = pm.end_systems(true);
    if (es.empty()) throw PlatformExhaustedError("no available end system");
    std::map<TaskId, HwId> out;
    for (TaskId id : priority_order(temporal)) {
        if (!am.tasks.contains(id)) continue;
        HwId best = es.front();
        Tick best_load = std::numeric_limits<Tick>::max();
        for (HwId e : es) {
            const auto it = current_loads.find(e);
            const Tick load = it == current_loads.end() ? 0 : it->second;
            if (load < best_load) {
                best_load = load;
                best = e;
            }
        }
        out[id] = best;
        current_loads[best] = best_load + am.tasks.at(id).wcet;
    }
    return out;
}

std::map<TaskId, HwId> least_loaded_allocation(const AppModel &am, const PlatformModel &pm,
                                               std::map<HwId, Tick> current_loads) {
    std::map<TaskId, double> temporal;
    for (const auto &[id, t] : am.tasks)
        temporal[id] = t.temporal_priority ? *t.temporal_priority : std::numeric_limits<double>::quiet_NaN();
    if (std::any_of(temporal.begin(), temporal.end(), [](const auto &kv) { return std::isnan(kv.second); }))
        temporal = b_level(am);
    return least_loaded_allocation(am, pm, temporal, std::move(current_loads));
}

PriorityAssignment HeuristicInference::infer(const AppModel &am, const PlatformModel &pm,
                                             const ContextModel &) const {
    PriorityAssignment p;
    p.temporal = b_level(am);
    p.spatial = least_loaded_allocation(am, pm, p.temporal);
    return p;
}

void validate_priorities(const PriorityAssignment &p, const AppModel &am, const PlatformModel &pm) {
    for (const auto &[id, t] : am.tasks) {
        const auto tp = p.temporal.find(id);
        if (tp == p.temporal.end() || !std::isfinite(tp->second) || tp->second < 0.0)
            throw InvalidInferenceError("task " + std::to_string(id) + " lacks a valid temporal priority");
        const auto sp = p.spatial.find(id);
        if (sp == p.spatial.end())
            throw InvalidInferenceError("task " + std::to_string(id) + " lacks a spatial target");
        if (!pm.is_end_system(sp->second) || !pm.is_available(sp->second))
            throw InvalidInferenceError("task " + std::to_string(id) + " mapped to unavailable end system " +
                                        std::to_string(sp->second));
    }
}

PriorityAssignment infer_priorities(const InferenceAdapter &adapter, const AppModel &am,
                                    const PlatformModel &pm, const ContextModel &window) {
    auto p = adapter.infer(am, pm, window);
    validate_priorities(p, am, pm);
    return p;
}

} // namespace ttms
