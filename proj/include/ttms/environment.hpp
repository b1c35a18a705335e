#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "ttms/bandits.hpp"
#include "ttms/features.hpp"
#include "ttms/reconstructor.hpp"

namespace ttms {

struct EnvironmentOptions {
    /// Largest arm count enumerated as complete assignments.
    std::size_t arm_cap = 1024;
    ReconstructOptions reconstruct;
    FeatureLayout layout;
};

/// Reconstructor-backed environment for one (scenario, event) cell.
///
/// Decision tasks are the pending tasks of the prefix in descending b-level. An arm fixes the end
/// system of the first `enumerated_tasks()` decision tasks (mixed radix, first task least
/// significant); the remaining tasks, if any, are placed least-loaded in priority order. A joint
/// action gives every decision task its own choice.
class SchedulingEnvironment final : public BanditEnvironment, public JointEnvironment {
  public:
    SchedulingEnvironment(AppModel am, PlatformModel pm, EvaluationProfile profile, FrozenPrefix prefix,
                          ContextEvent event = {}, EnvironmentOptions options = {});

    const AppModel &app() const { return am_; }
    const PlatformModel &platform() const { return pm_; }
    const EvaluationProfile &profile() const { return profile_; }
    const FrozenPrefix &prefix() const { return prefix_; }
    const ContextEvent &event() const { return event_; }
    const std::vector<TaskId> &decision_tasks() const { return decision_; }
    const std::vector<HwId> &choices() const { return choices_; }
    std::size_t enumerated_tasks() const { return enumerated_; }

    std::size_t action_count() const override { return arms_; }
    Assignment resolve(std::size_t arm) const override;
    std::vector<std::size_t> agent_action_counts() const override;
    Assignment resolve_joint(const std::vector<std::size_t> &actions) const override;
    /// Reconstruct, safety-check and evaluate; any failure yields the penalty reward.
    Outcome evaluate(const Assignment &assignment) const override;

    /// Busy time of frozen work per available end system.
    const std::map<HwId, Tick> &frozen_loads() const { return loads_; }
    Eigen::VectorXd features() const;
    /// One column per arm: the resolved assignment one-hot over (decision task, end system choice).
    Eigen::MatrixXd arm_encodings() const;
    double penalty() const { return penalty_reward(profile_); }

  private:
    AppModel am_;
    PlatformModel pm_;
    EvaluationProfile profile_;
    FrozenPrefix prefix_;
    ContextEvent event_;
    EnvironmentOptions options_;
    std::map<TaskId, double> temporal_;
    std::vector<TaskId> decision_;
    std::vector<HwId> choices_;
    std::map<HwId, Tick> loads_;
    std::size_t enumerated_ = 0;
    std::size_t arms_ = 1;
};

} // namespace ttms
