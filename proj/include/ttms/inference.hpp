#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ttms/features.hpp"
#include "ttms/neural.hpp"
#include "ttms/priorities.hpp"

namespace ttms {

/// Retrainable spatial inference: b-level temporal priorities, spatial targets from an MLP that
/// scores every (task, end system) pair. Each task takes the highest-scoring available end system,
/// ties to the lowest id.
class SpatialInference final : public InferenceAdapter {
  public:
    SpatialInference(Mlp net, FeatureLayout layout);
    static SpatialInference random(const std::vector<int> &hidden, FeatureLayout layout, std::uint64_t seed);

    /// The last event of `window` (if any) feeds the context fields of the feature vector.
    PriorityAssignment infer(const AppModel &am, const PlatformModel &pm, const ContextModel &window) const override;
    std::string name() const override { return "neural"; }

    std::map<TaskId, HwId> assign(const Eigen::VectorXd &features, const AppModel &am, const PlatformModel &pm) const;

    const Mlp &network() const { return net_; }
    Mlp &network() { return net_; }
    const FeatureLayout &layout() const { return layout_; }

  private:
    Mlp net_;
    FeatureLayout layout_;
};

/// One held-out problem: models after the event, scheduled from scratch.
struct ValidationInstance {
    AppModel am;
    PlatformModel pm;
    ContextEvent event;
};

/// Makespan obtained when `adapter` drives the reconstructor; infeasible outcomes count as
/// 10 x deadline.
double instance_makespan(const InferenceAdapter &adapter, const ValidationInstance &instance);
double validation_makespan(const InferenceAdapter &adapter, const std::vector<ValidationInstance> &validation);

struct CommitDecision {
    bool committed = false;
    double candidate_metric = 0.0;
    double incumbent_metric = 0.0;
};

struct CommitResult {
    SpatialInference chosen;
    CommitDecision decision;
};

/// Keeps the candidate iff its mean validation makespan is <= the incumbent's.
/// Throws EmptyValidationSetError.
CommitResult commit_if_improved(const SpatialInference &candidate, const SpatialInference &incumbent,
                                const std::vector<ValidationInstance> &validation);

} // namespace ttms
