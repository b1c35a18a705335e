#include "ttms/bandits.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ttms/errors.hpp"

namespace ttms {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count();
}

template <typename Predictor>
bool maybe_train(Predictor &p) {
    if (++p.since_training < p.train_every) return false;
    p.since_training = 0;
    const std::size_t n = std::min(p.window, p.buffer.size());
    const std::vector<Sample> recent(p.buffer.end() - static_cast<std::ptrdiff_t>(n), p.buffer.end());
    p.net = train(p.net, recent, p.train_config).net;
    return true;
}

} // namespace

double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(Rng &rng, std::size_t n) {
    if (n == 0) throw EmptyActionSpaceError("cannot draw from an empty range");
    return static_cast<std::size_t>(rng() % n);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

EpsilonSchedule epsilon_step(EpsilonSchedule s) {
    s.epsilon = std::max(0.0, s.epsilon * s.decay);
    ++s.step;
    return s;
}

BanditState::BanditState(std::size_t actions, EpsilonSchedule schedule, std::optional<double> learning_rate)
    : q(actions, 0.0), counts(actions, 0), learning_rate(learning_rate), schedule(schedule) {}

void q_update(BanditState &state, std::size_t action, double reward) {
    if (action >= state.q.size()) throw UnknownActionError("action " + std::to_string(action) + " out of range");
    ++state.counts[action];
    const double alpha = state.learning_rate ? *state.learning_rate : 1.0 / static_cast<double>(state.counts[action]);
    state.q[action] += alpha * (reward - state.q[action]);
}

std::size_t greedy_action(const std::vector<double> &values) {
    if (values.empty()) throw EmptyActionSpaceError("no actions to choose from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

std::size_t epsilon_greedy(const std::vector<double> &values, double epsilon, Rng &rng) {
    if (values.empty()) throw EmptyActionSpaceError("no actions to choose from");
    if (uniform01(rng) < epsilon) return uniform_index(rng, values.size());
    return greedy_action(values);
}

std::size_t select_action(const BanditState &state, Rng &rng) {
    return epsilon_greedy(state.q, state.schedule.epsilon, rng);
}

bool BestCatalog::offer(const Outcome &outcome) {
    rewards.push_back(outcome.reward);
    bool improved = false;
    if (!best_reward || outcome.reward > *best_reward) {
        best_reward = outcome.reward;
        if (outcome.feasible && outcome.schedule) {
            best_schedule = outcome.schedule;
            best_assignment = outcome.assignment;
            improved = true;
        }
    }
    best_so_far.push_back(*best_reward);
    return improved;
}

EpisodeRecord mab_episode(const BanditEnvironment &env, BanditState &state, BestCatalog &catalog, Rng &rng) {
    if (state.action_count() != env.action_count())
        throw DimensionMismatchError("bandit state does not match the arm count");
    EpisodeRecord rec;
    rec.epsilon = state.schedule.epsilon;
    const auto t0 = Clock::now();
    const std::size_t arm = select_action(state, rng);
    const Assignment action = env.resolve(arm);
    rec.decision_ns = elapsed_ns(t0);
    rec.outcome = env.evaluate(action);
    rec.reward = rec.outcome.reward;
    q_update(state, arm, rec.reward);
    state.schedule = epsilon_step(state.schedule);
    rec.improved = catalog.offer(rec.outcome);
    rec.best_reward = *catalog.best_reward;
    rec.prediction_error = std::numeric_limits<double>::quiet_NaN();
    return rec;
}

CbPredictor CbPredictor::create(int feature_size, std::size_t actions, const std::vector<int> &hidden,
                                std::uint64_t seed, TrainConfig cfg, double reward_scale) {
    const auto n = static_cast<Eigen::Index>(actions);
    return create(feature_size, Eigen::MatrixXd::Identity(n, n), hidden, seed, cfg, reward_scale);
}

CbPredictor CbPredictor::create(int feature_size, Eigen::MatrixXd action_encodings, const std::vector<int> &hidden,
                                std::uint64_t seed, TrainConfig cfg, double reward_scale) {
    std::vector<int> sizes{feature_size + static_cast<int>(action_encodings.rows())};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    CbPredictor p;
    p.net = Mlp::random(sizes, seed);
    p.train_config = cfg;
    p.action_encodings = std::move(action_encodings);
    p.reward_scale = reward_scale;
    return p;
}

const std::vector<double> &CbPredictor::estimates(const Eigen::VectorXd &features) {
    if (features.size() != feature_size())
        throw DimensionMismatchError("context features have " + std::to_string(features.size()) +
                                     " entries, predictor expects " + std::to_string(feature_size()));
    if (stale_ || cached_features_.size() != features.size() || cached_features_ != features) {
        Eigen::MatrixXd batch(net.input_size(), action_encodings.cols());
        batch.topRows(features.size()) = features.replicate(1, action_encodings.cols());
        batch.bottomRows(action_encodings.rows()) = action_encodings;
        const Eigen::MatrixXd y = forward_batch(net, batch);
        cached_.assign(y.data(), y.data() + y.size());
        cached_features_ = features;
        stale_ = false;
    }
    return cached_;
}

Eigen::VectorXd CbPredictor::input(const Eigen::VectorXd &features, std::size_t arm) const {
    Eigen::VectorXd x(net.input_size());
    x << features, action_encodings.col(static_cast<Eigen::Index>(arm));
    return x;
}

void CbPredictor::append(Sample sample) {
    buffer.push_back(std::move(sample));
    if (buffer.size() > 4 * window) buffer.erase(buffer.begin(), buffer.end() - static_cast<std::ptrdiff_t>(window));
    if (maybe_train(*this)) stale_ = true;
}

EpisodeRecord cb_episode(const BanditEnvironment &env, BanditState &state, const Eigen::VectorXd &features,
                         CbPredictor &predictor, BestCatalog &catalog, Rng &rng) {
    if (predictor.action_count() != env.action_count() || state.action_count() != env.action_count())
        throw DimensionMismatchError("predictor actions do not match the arm count");
    EpisodeRecord rec;
    rec.epsilon = state.schedule.epsilon;
    const auto t0 = Clock::now();
    const std::vector<double> &values = predictor.estimates(features);
    const std::size_t arm = epsilon_greedy(values, state.schedule.epsilon, rng);
    const double estimate = values[arm];
    const Assignment action = env.resolve(arm);
    rec.decision_ns = elapsed_ns(t0);

    rec.outcome = env.evaluate(action);
    rec.reward = rec.outcome.reward;
    const double scaled = rec.reward / predictor.reward_scale;
    rec.prediction_error = std::abs(estimate - scaled);

    Sample s;
    s.input = predictor.input(features, arm);
    s.target = Eigen::VectorXd::Constant(1, scaled);
    predictor.append(std::move(s));

    q_update(state, arm, rec.reward);
    state.schedule = epsilon_step(state.schedule);
    rec.improved = catalog.offer(rec.outcome);
    rec.best_reward = *catalog.best_reward;
    return rec;
}

AgentEnsemble::AgentEnsemble(const std::vector<std::size_t> &action_counts, EpsilonSchedule schedule,
                             std::optional<double> learning_rate)
    : schedule(schedule) {
    for (std::size_t n : action_counts) agents.emplace_back(n, schedule, learning_rate);
}

JointPredictor JointPredictor::create(Eigen::VectorXd features, std::vector<std::size_t> action_counts,
                                      const std::vector<int> &hidden, std::uint64_t seed, TrainConfig cfg,
                                      double reward_scale) {
    JointPredictor p;
    p.features = std::move(features);
    p.action_counts = std::move(action_counts);
    std::size_t width = static_cast<std::size_t>(p.features.size());
    for (std::size_t n : p.action_counts) width += n;
    std::vector<int> sizes{static_cast<int>(width)};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    p.net = Mlp::random(sizes, seed);
    p.train_config = cfg;
    p.reward_scale = reward_scale;
    return p;
}

Eigen::VectorXd JointPredictor::encode(const std::vector<std::size_t> &actions) const {
    if (actions.size() != action_counts.size()) throw DimensionMismatchError("joint action has the wrong agent count");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(net.input_size());
    x.head(features.size()) = features;
    Eigen::Index offset = features.size();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i] >= action_counts[i]) throw UnknownActionError("agent action out of range");
        x(offset + static_cast<Eigen::Index>(actions[i])) = 1.0;
        offset += static_cast<Eigen::Index>(action_counts[i]);
    }
    return x;
}

double JointPredictor::predict(const std::vector<std::size_t> &actions) const {
    return forward(net, encode(actions))(0);
}

void JointPredictor::append(const std::vector<std::size_t> &actions, double reward) {
    Sample s;
    s.input = encode(actions);
    s.target = Eigen::VectorXd::Constant(1, reward / reward_scale);
    buffer.push_back(std::move(s));
    if (buffer.size() > 4 * window) buffer.erase(buffer.begin(), buffer.end() - static_cast<std::ptrdiff_t>(window));
    maybe_train(*this);
}

EpisodeRecord marl_episode(AgentEnsemble &ensemble, const JointEnvironment &env, BestCatalog &catalog, Rng &rng,
                           JointPredictor *predictor) {
    const auto counts = env.agent_action_counts();
    if (counts.size() != ensemble.agents.size()) throw DimensionMismatchError("ensemble is not sized to the task set");
    EpisodeRecord rec;
    rec.epsilon = ensemble.schedule.epsilon;
    const auto t0 = Clock::now();
    std::vector<std::size_t> joint(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (ensemble.agents[i].action_count() != counts[i])
            throw DimensionMismatchError("agent " + std::to_string(i) + " action space mismatch");
        joint[i] = epsilon_greedy(ensemble.agents[i].q, ensemble.schedule.epsilon, rng);
    }
    const Assignment action = env.resolve_joint(joint);
    rec.decision_ns = elapsed_ns(t0);

    rec.outcome = env.evaluate(action);
    rec.reward = rec.outcome.reward;
    rec.prediction_error = std::numeric_limits<double>::quiet_NaN();
    if (predictor != nullptr) {
        rec.prediction_error = std::abs(predictor->predict(joint) - rec.reward / predictor->reward_scale);
        predictor->append(joint, rec.reward);
    }
    ensemble.schedule = epsilon_step(ensemble.schedule);
    for (std::size_t i = 0; i < joint.size(); ++i) {
        q_update(ensemble.agents[i], joint[i], rec.reward);
        ensemble.agents[i].schedule = ensemble.schedule;
    }
    rec.improved = catalog.offer(rec.outcome);
    rec.best_reward = *catalog.best_reward;
    return rec;
}

bool check_trigger(const EvaluationReport &report, TriggerMode mode) {
    return mode == TriggerMode::continuous || !report.deadline_met;
}

} // namespace ttms
