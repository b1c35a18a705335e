#include "ttms/environment.hpp"

#include "ttms/errors.hpp"

namespace ttms {

SchedulingEnvironment::SchedulingEnvironment(AppModel am, PlatformModel pm, EvaluationProfile profile,
                                             FrozenPrefix prefix, ContextEvent event, EnvironmentOptions options)
    : am_(std::move(am)), pm_(std::move(pm)), profile_(profile), prefix_(std::move(prefix)), event_(event),
      options_(options) {
    temporal_ = b_level(am_);
    for (TaskId tid : priority_order(temporal_))
        if (!prefix_.tasks.contains(tid)) decision_.push_back(tid);
    choices_ = pm_.end_systems(true);
    if (choices_.empty()) throw PlatformExhaustedError("no available end system");
    for (HwId es : choices_) loads_[es] = 0;
    for (const auto &[tid, e] : prefix_.tasks)
        if (loads_.contains(e.es)) loads_[e.es] += e.end - e.start;

    const std::size_t k = choices_.size();
    while (enumerated_ < decision_.size() && arms_ * k <= std::max<std::size_t>(options_.arm_cap, 1)) {
        arms_ *= k;
        ++enumerated_;
    }
}

Assignment SchedulingEnvironment::resolve(std::size_t arm) const {
    if (arm >= arms_) throw UnknownActionError("arm " + std::to_string(arm) + " out of range");
    Assignment out;
    std::map<HwId, Tick> loads = loads_;
    const std::size_t k = choices_.size();
    for (std::size_t i = 0; i < enumerated_; ++i) {
        const HwId es = choices_[arm % k];
        arm /= k;
        out[decision_[i]] = es;
        loads[es] += am_.tasks.at(decision_[i]).wcet;
    }
    for (std::size_t i = enumerated_; i < decision_.size(); ++i) {
        HwId best = choices_.front();
        for (HwId es : choices_)
            if (loads[es] < loads[best]) best = es;
        out[decision_[i]] = best;
        loads[best] += am_.tasks.at(decision_[i]).wcet;
    }
    return out;
}

Eigen::MatrixXd SchedulingEnvironment::arm_encodings() const {
    const auto k = static_cast<Eigen::Index>(choices_.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(decision_.size()) * k,
                                                static_cast<Eigen::Index>(arms_));
    std::map<HwId, Eigen::Index> column;
    for (Eigen::Index j = 0; j < k; ++j) column[choices_[static_cast<std::size_t>(j)]] = j;
    for (std::size_t arm = 0; arm < arms_; ++arm) {
        const Assignment a = resolve(arm);
        for (std::size_t i = 0; i < decision_.size(); ++i)
            out(static_cast<Eigen::Index>(i) * k + column.at(a.at(decision_[i])), static_cast<Eigen::Index>(arm)) = 1.0;
    }
    return out;
}

std::vector<std::size_t> SchedulingEnvironment::agent_action_counts() const {
    return std::vector<std::size_t>(decision_.size(), choices_.size());
}

Assignment SchedulingEnvironment::resolve_joint(const std::vector<std::size_t> &actions) const {
    if (actions.size() != decision_.size()) throw DimensionMismatchError("joint action has the wrong agent count");
    Assignment out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i] >= choices_.size()) throw UnknownActionError("agent action out of range");
        out[decision_[i]] = choices_[actions[i]];
    }
    return out;
}

Outcome SchedulingEnvironment::evaluate(const Assignment &assignment) const {
    Outcome o;
    o.assignment = assignment;
    o.reward = penalty();
    try {
        const PriorityAssignment p{temporal_, assignment};
        Schedule s = reconstruct(am_, pm_, p, prefix_, options_.reconstruct);
        if (!safety_check(s, am_, pm_).empty()) return o;
        o.reward = evaluate_unchecked(s, profile_).reward;
        o.feasible = true;
        o.schedule = std::move(s);
    } catch (const Error &) {
    }
    return o;
}

Eigen::VectorXd SchedulingEnvironment::features() const {
    return context_features(am_, pm_, event_, loads_, options_.layout);
}

} // namespace ttms
