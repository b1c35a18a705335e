#pragma once

#include <Eigen/Dense>

#include <map>
#include <vector>

#include "ttms/context.hpp"
#include "ttms/models.hpp"

namespace ttms {

/// Fixed-size encoding of (AM, PM, CM) for the neural predictors and inferences.
///
/// Layout: max_tasks normalised wcets (zero padded) | max_es availability bits |
/// max_es normalised loads | 5 context-event fields scaled to [0, 1].
struct FeatureLayout {
    int max_tasks = 32;
    int max_es = 8;

    int size() const { return max_tasks + 2 * max_es + 5; }
    /// One score per (task slot, ES slot).
    int spatial_outputs() const { return max_tasks * max_es; }

    bool operator==(const FeatureLayout &) const = default;
};

/// Task ids in slot order. Throws DimensionMismatchError when the model exceeds the layout.
std::vector<TaskId> task_slots(const AppModel &am, const FeatureLayout &layout);
/// End-system ids (available or not) in slot order.
std::vector<HwId> es_slots(const PlatformModel &pm, const FeatureLayout &layout);

Eigen::VectorXd context_features(const AppModel &am, const PlatformModel &pm, const ContextEvent &event,
                                 const std::map<HwId, Tick> &loads, const FeatureLayout &layout);

/// One-hot (task slot, ES slot) target for a spatial assignment; mask covers real tasks x available ES.
Eigen::VectorXd spatial_target(const std::map<TaskId, HwId> &assignment, const AppModel &am,
                               const PlatformModel &pm, const FeatureLayout &layout);
Eigen::VectorXd spatial_mask(const AppModel &am, const PlatformModel &pm, const FeatureLayout &layout);

} // namespace ttms
