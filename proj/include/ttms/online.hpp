#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttms/environment.hpp"

namespace ttms {

enum class ModelKind { mab, cb, marl };

std::string to_string(ModelKind kind);
/// Throws ConfigError.
ModelKind parse_model_kind(const std::string &name);
/// 0.963 (MAB), 0.96 (CB), 0.99 (MARL).
double default_decay(ModelKind kind);

struct OnlineConfig {
    /// Overrides default_decay().
    std::optional<double> decay;
    /// Constant tabular step size; unset means 1 / count.
    std::optional<double> learning_rate;
    std::vector<int> cb_hidden{10, 10};
    TrainConfig cb_train{0.001, 100};
    std::vector<int> marl_hidden{16, 16};
    TrainConfig marl_train{0.1, 20};
    std::size_t train_every = 20;
    std::size_t window = 128;
    /// Attach a joint-action reward predictor to MARL runs.
    bool marl_predictor = true;
};

/// Enhancement-training label: the context features and the best assignment found.
struct TrainingExample {
    Eigen::VectorXd features;
    std::map<TaskId, HwId> assignment;
    double reward = 0.0;
};

enum class OnlineStatus { ok, no_feasible, empty };

std::string to_string(OnlineStatus status);

struct OnlineResult {
    BestCatalog catalog;
    /// One record per episode; outcomes are dropped to bound memory.
    std::vector<EpisodeRecord> trace;
    std::vector<TrainingExample> dataset;
    /// Safe schedules that strictly improved the catalog, in discovery order.
    std::vector<Schedule> improvements;
    OnlineStatus status = OnlineStatus::empty;
};

/// Runs `budget` episodes of the chosen model against `env`. Every random stream derives from `seed`.
OnlineResult run_online_learning(const SchedulingEnvironment &env, ModelKind kind, std::size_t budget,
                                 const OnlineConfig &config, std::uint64_t seed);

} // namespace ttms
