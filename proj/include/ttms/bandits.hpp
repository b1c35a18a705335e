#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "ttms/neural.hpp"
#include "ttms/schedule.hpp"

namespace ttms {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng &rng);
/// Uniform index in [0, n).
std::size_t uniform_index(Rng &rng, std::size_t n);
/// SplitMix64 finaliser; derives independent stream seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct EpsilonSchedule {
    double epsilon = 1.0;
    double decay = 0.963;
    std::uint64_t step = 0;
};

EpsilonSchedule epsilon_step(EpsilonSchedule s);

/// Tabular action values. Actions are dense indices [0, action_count()).
struct BanditState {
    std::vector<double> q;
    std::vector<std::uint64_t> counts;
    /// Constant step size; unset means 1 / count(a).
    std::optional<double> learning_rate;
    EpsilonSchedule schedule;

    BanditState() = default;
    BanditState(std::size_t actions, EpsilonSchedule schedule, std::optional<double> learning_rate = {});

    std::size_t action_count() const { return q.size(); }
};

/// Q(a) += alpha * (r - Q(a)) for the chosen action only. Throws UnknownActionError.
void q_update(BanditState &state, std::size_t action, double reward);

/// Index of the largest value, ties to the lowest index. Throws EmptyActionSpaceError.
std::size_t greedy_action(const std::vector<double> &values);

/// Epsilon-greedy over arbitrary value estimates: with probability epsilon a uniform action,
/// otherwise greedy_action. One rng draw decides, a second picks the random action.
std::size_t epsilon_greedy(const std::vector<double> &values, double epsilon, Rng &rng);
std::size_t select_action(const BanditState &state, Rng &rng);

using Assignment = std::map<TaskId, HwId>;

/// Result of one reconstruction + evaluation.
struct Outcome {
    double reward = 0.0;
    bool feasible = false;
    std::optional<Schedule> schedule;
    Assignment assignment;
};

struct BestCatalog {
    std::optional<double> best_reward;
    std::optional<Schedule> best_schedule;
    Assignment best_assignment;
    std::vector<double> rewards;
    std::vector<double> best_so_far;

    /// Records the episode reward; returns true when a feasible outcome strictly improves the best.
    bool offer(const Outcome &outcome);
    bool has_schedule() const { return best_schedule.has_value(); }
};

/// A finite arm set whose pulls are deterministic. resolve() turns an arm into the concrete
/// action and is timed as part of the decision; evaluate() is the observer.
class BanditEnvironment {
  public:
    virtual ~BanditEnvironment() = default;
    virtual std::size_t action_count() const = 0;
    virtual Assignment resolve(std::size_t arm) const = 0;
    virtual Outcome evaluate(const Assignment &action) const = 0;
    Outcome pull(std::size_t arm) const { return evaluate(resolve(arm)); }
};

/// One action per agent, assembled by the coordinator and evaluated jointly.
class JointEnvironment {
  public:
    virtual ~JointEnvironment() = default;
    virtual std::vector<std::size_t> agent_action_counts() const = 0;
    virtual Assignment resolve_joint(const std::vector<std::size_t> &actions) const = 0;
    virtual Outcome evaluate(const Assignment &action) const = 0;
    Outcome pull_joint(const std::vector<std::size_t> &actions) const { return evaluate(resolve_joint(actions)); }
};

struct EpisodeRecord {
    double epsilon = 0.0;
    double reward = 0.0;
    double best_reward = 0.0;
    /// |predicted - observed| in normalised reward units; NaN when no predictor is attached.
    double prediction_error = 0.0;
    std::int64_t decision_ns = 0;
    bool improved = false;
    Outcome outcome;
};

EpisodeRecord mab_episode(const BanditEnvironment &env, BanditState &state, BestCatalog &catalog, Rng &rng);

/// Neural reward predictor for the contextual bandit. One network scores (context, action) pairs:
/// its input is the context features followed by the action's encoding, its single output the
/// scaled reward. Estimates for every action are cached until the network or the context changes.
struct CbPredictor {
    Mlp net;
    TrainConfig train_config;
    /// One column per arm.
    Eigen::MatrixXd action_encodings;
    /// Train every `train_every` appended samples on the most recent `window` samples.
    std::size_t train_every = 10;
    std::size_t window = 256;
    /// Observed rewards are divided by this before training.
    double reward_scale = 1.0;
    std::vector<Sample> buffer;
    std::size_t since_training = 0;

    /// Arms encoded one-hot.
    static CbPredictor create(int feature_size, std::size_t actions, const std::vector<int> &hidden,
                              std::uint64_t seed, TrainConfig cfg, double reward_scale);
    static CbPredictor create(int feature_size, Eigen::MatrixXd action_encodings, const std::vector<int> &hidden,
                              std::uint64_t seed, TrainConfig cfg, double reward_scale);

    std::size_t action_count() const { return static_cast<std::size_t>(action_encodings.cols()); }
    int feature_size() const { return net.input_size() - static_cast<int>(action_encodings.rows()); }
    /// Scaled reward estimate of every arm in `features`.
    const std::vector<double> &estimates(const Eigen::VectorXd &features);
    Eigen::VectorXd input(const Eigen::VectorXd &features, std::size_t arm) const;
    void append(Sample sample);

  private:
    Eigen::VectorXd cached_features_;
    std::vector<double> cached_;
    bool stale_ = true;
};

/// Chooses epsilon-greedily over the predictor's estimates for `features`, observes the true reward,
/// appends (features, action, reward) to the predictor's buffer and steps epsilon.
/// Throws DimensionMismatchError when `features` or the arm count do not match the predictor.
EpisodeRecord cb_episode(const BanditEnvironment &env, BanditState &state, const Eigen::VectorXd &features,
                         CbPredictor &predictor, BestCatalog &catalog, Rng &rng);

/// One tabular agent per task and a shared epsilon stepped once per episode.
struct AgentEnsemble {
    std::vector<BanditState> agents;
    EpsilonSchedule schedule;

    AgentEnsemble() = default;
    AgentEnsemble(const std::vector<std::size_t> &action_counts, EpsilonSchedule schedule,
                  std::optional<double> learning_rate = {});
};

/// Reward model for a joint action: input = features followed by one-hot agent choices, one output.
struct JointPredictor {
    Mlp net;
    TrainConfig train_config;
    std::size_t train_every = 10;
    std::size_t window = 256;
    double reward_scale = 1.0;
    Eigen::VectorXd features;
    std::vector<std::size_t> action_counts;
    std::vector<Sample> buffer;
    std::size_t since_training = 0;

    static JointPredictor create(Eigen::VectorXd features, std::vector<std::size_t> action_counts,
                                 const std::vector<int> &hidden, std::uint64_t seed, TrainConfig cfg,
                                 double reward_scale);
    Eigen::VectorXd encode(const std::vector<std::size_t> &actions) const;
    double predict(const std::vector<std::size_t> &actions) const;
    void append(const std::vector<std::size_t> &actions, double reward);
};

/// Every agent picks epsilon-greedily, the coordinator evaluates the joint action once and the
/// shared reward updates every agent. `predictor` (optional) is queried before and trained after.
EpisodeRecord marl_episode(AgentEnsemble &ensemble, const JointEnvironment &env, BestCatalog &catalog, Rng &rng,
                           JointPredictor *predictor = nullptr);

enum class TriggerMode { on_miss, continuous };

bool check_trigger(const EvaluationReport &report, TriggerMode mode);

} // namespace ttms
