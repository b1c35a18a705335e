#include "ttms/features.hpp"

#include <algorithm>

#include "ttms/errors.hpp"

namespace ttms {

std::vector<TaskId> task_slots(const AppModel &am, const FeatureLayout &layout) {
    if (static_cast<int>(am.tasks.size()) > layout.max_tasks)
        throw DimensionMismatchError(std::to_string(am.tasks.size()) + " tasks exceed the feature layout (" +
                                     std::to_string(layout.max_tasks) + ")");
    std::vector<TaskId> ids;
    for (const auto &[id, t] : am.tasks) ids.push_back(id);
    return ids;
}

std::vector<HwId> es_slots(const PlatformModel &pm, const FeatureLayout &layout) {
    auto es = pm.end_systems(false);
    if (static_cast<int>(es.size()) > layout.max_es)
        throw DimensionMismatchError(std::to_string(es.size()) + " end systems exceed the feature layout (" +
                                     std::to_string(layout.max_es) + ")");
    return es;
}

Eigen::VectorXd context_features(const AppModel &am, const PlatformModel &pm, const ContextEvent &event,
                                 const std::map<HwId, Tick> &loads, const FeatureLayout &layout) {
    const auto tasks = task_slots(am, layout);
    const auto es = es_slots(pm, layout);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(layout.size());

    Tick max_wcet = 1, total = 0;
    for (const auto &[id, t] : am.tasks) {
        max_wcet = std::max(max_wcet, t.wcet);
        total += t.wcet;
    }
    for (std::size_t i = 0; i < tasks.size(); ++i)
        f(static_cast<Eigen::Index>(i)) = static_cast<double>(am.tasks.at(tasks[i]).wcet) / static_cast<double>(max_wcet);

    const Eigen::Index avail = layout.max_tasks, load = layout.max_tasks + layout.max_es;
    for (std::size_t j = 0; j < es.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        f(avail + idx) = pm.is_available(es[j]) ? 1.0 : 0.0;
        const auto it = loads.find(es[j]);
        if (it != loads.end()) f(load + idx) = static_cast<double>(it->second) / static_cast<double>(std::max<Tick>(1, total));
    }
    const Eigen::Index ctx = layout.max_tasks + 2 * layout.max_es;
    f(ctx + 0) = static_cast<double>(event.kind) / 7.0;
    f(ctx + 1) = static_cast<double>(event.value) / 7.0;
    f(ctx + 2) = static_cast<double>(event.affected_task) / 1023.0;
    f(ctx + 3) = static_cast<double>(event.timestamp) / 1023.0;
    f(ctx + 4) = static_cast<double>(event.hw_id) / 63.0;
    return f;
}

Eigen::VectorXd spatial_target(const std::map<TaskId, HwId> &assignment, const AppModel &am,
                               const PlatformModel &pm, const FeatureLayout &layout) {
    const auto tasks = task_slots(am, layout);
    const auto es = es_slots(pm, layout);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(layout.spatial_outputs());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto it = assignment.find(tasks[i]);
        if (it == assignment.end()) continue;
        const auto pos = std::find(es.begin(), es.end(), it->second);
        if (pos == es.end()) throw DimensionMismatchError("assignment targets an unknown end system");
        t(static_cast<Eigen::Index>(i) * layout.max_es + (pos - es.begin())) = 1.0;
    }
    return t;
}

Eigen::VectorXd spatial_mask(const AppModel &am, const PlatformModel &pm, const FeatureLayout &layout) {
    const auto tasks = task_slots(am, layout);
    const auto es = es_slots(pm, layout);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(layout.spatial_outputs());
    for (std::size_t i = 0; i < tasks.size(); ++i)
        for (std::size_t j = 0; j < es.size(); ++j)
            if (pm.is_available(es[j])) m(static_cast<Eigen::Index>(i * static_cast<std::size_t>(layout.max_es) + j)) = 1.0;
    return m;
}

} // namespace ttms
