#include "ttms/online.hpp"

#include "ttms/errors.hpp"

namespace ttms {

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::mab: return "mab";
    case ModelKind::cb: return "cb";
    case ModelKind::marl: return "marl";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string &name) {
    if (name == "mab") return ModelKind::mab;
    if (name == "cb") return ModelKind::cb;
    if (name == "marl") return ModelKind::marl;
    throw ConfigError("unknown model kind '" + name + "'");
}

double default_decay(ModelKind kind) {
    switch (kind) {
    case ModelKind::mab: return 0.963;
    case ModelKind::cb: return 0.96;
    case ModelKind::marl: return 0.99;
    }
    return 0.963;
}

std::string to_string(OnlineStatus status) {
    switch (status) {
    case OnlineStatus::ok: return "ok";
    case OnlineStatus::no_feasible: return "no_feasible";
    case OnlineStatus::empty: return "empty";
    }
    return "unknown";
}

OnlineResult run_online_learning(const SchedulingEnvironment &env, ModelKind kind, std::size_t budget,
                                 const OnlineConfig &config, std::uint64_t seed) {
    OnlineResult result;
    if (budget == 0) return result;
    const EpsilonSchedule schedule{1.0, config.decay.value_or(default_decay(kind)), 0};
    const double scale = static_cast<double>(std::max<Tick>(env.profile().deadline, 1));
    Rng rng(mix_seed(seed, 1));
    result.trace.reserve(budget);

    auto record = [&result](EpisodeRecord rec) {
        if (rec.improved) result.improvements.push_back(*rec.outcome.schedule);
        rec.outcome = Outcome{};
        result.trace.push_back(std::move(rec));
    };

    switch (kind) {
    case ModelKind::mab: {
        BanditState state(env.action_count(), schedule, config.learning_rate);
        for (std::size_t e = 0; e < budget; ++e) record(mab_episode(env, state, result.catalog, rng));
        break;
    }
    case ModelKind::cb: {
        const Eigen::VectorXd features = env.features();
        BanditState state(env.action_count(), schedule, config.learning_rate);
        CbPredictor predictor = CbPredictor::create(static_cast<int>(features.size()), env.arm_encodings(),
                                                    config.cb_hidden, mix_seed(seed, 2), config.cb_train, scale);
        predictor.train_every = config.train_every;
        predictor.window = config.window;
        for (std::size_t e = 0; e < budget; ++e)
            record(cb_episode(env, state, features, predictor, result.catalog, rng));
        break;
    }
    case ModelKind::marl: {
        AgentEnsemble ensemble(env.agent_action_counts(), schedule, config.learning_rate);
        std::optional<JointPredictor> predictor;
        if (config.marl_predictor) {
            predictor = JointPredictor::create(env.features(), env.agent_action_counts(), config.marl_hidden,
                                               mix_seed(seed, 3), config.marl_train, scale);
            predictor->train_every = config.train_every;
            predictor->window = config.window;
        }
        for (std::size_t e = 0; e < budget; ++e)
            record(marl_episode(ensemble, env, result.catalog, rng, predictor ? &*predictor : nullptr));
        break;
    }
    }

    if (!result.catalog.has_schedule()) {
        result.status = OnlineStatus::no_feasible;
        return result;
    }
    result.status = OnlineStatus::ok;
    try {
        result.dataset.push_back({env.features(), result.catalog.best_assignment, *result.catalog.best_reward});
    } catch (const DimensionMismatchError &) {
    }
    return result;
}

} // namespace ttms
