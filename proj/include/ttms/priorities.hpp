#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ttms/context.hpp"
#include "ttms/models.hpp"

namespace ttms {

/// Temporal priorities (higher runs earlier) and spatial targets (end system per task).
struct PriorityAssignment {
    std::map<TaskId, double> temporal;
    std::map<TaskId, HwId> spatial;

    bool operator==(const PriorityAssignment &) const = default;
};

/// Bottom level: w(v) plus the largest bottom level among successors (0 for exit tasks).
/// Message edges count as precedence with zero weight.
std::map<TaskId, double> b_level(const AppModel &am);

/// Tasks by descending priority, equal priorities by ascending id.
std::vector<TaskId> priority_order(const std::map<TaskId, double> &temporal);

/// Greedy least-loaded placement in descending temporal priority; equal loads go to the lowest id.
/// Missing entries in `current_loads` count as zero.
std::map<TaskId, HwId> least_loaded_allocation(const AppModel &am, const PlatformModel &pm,
                                               const std::map<TaskId, double> &temporal,
                                               std::map<HwId, Tick> current_loads = {});
std::map<TaskId, HwId> least_loaded_allocation(const AppModel &am, const PlatformModel &pm,
                                               std::map<HwId, Tick> current_loads = {});

/// Source of temporal and spatial priorities.
class InferenceAdapter {
  public:
    virtual ~InferenceAdapter() = default;
    virtual PriorityAssignment infer(const AppModel &am, const PlatformModel &pm,
                                     const ContextModel &window) const = 0;
    virtual std::string name() const = 0;
};

/// b-level temporal priorities composed with least-loaded spatial placement.
class HeuristicInference final : public InferenceAdapter {
  public:
    PriorityAssignment infer(const AppModel &am, const PlatformModel &pm,
                             const ContextModel &window) const override;
    std::string name() const override { return "heuristic"; }
};

/// Throws InvalidInferenceError unless every task has a finite non-negative temporal priority
/// and a spatial target that is an available end system.
void validate_priorities(const PriorityAssignment &p, const AppModel &am, const PlatformModel &pm);

PriorityAssignment infer_priorities(const InferenceAdapter &adapter, const AppModel &am,
                                    const PlatformModel &pm, const ContextModel &window = {});

} // namespace ttms
