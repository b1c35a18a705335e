#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttms/inference.hpp"
#include "ttms/online.hpp"
#include "ttms/scenario.hpp"

namespace ttms {

inline constexpr int csv_schema_version = 1;

struct SweepConfig {
    std::vector<double> decays{0.9, 0.95, 0.963, 0.98, 0.99};
    /// Number of leading (scenario, event) cells swept.
    int cells = 4;
    std::size_t episodes = 300;
};

struct RetrainConfig {
    int bases = 50;
    int variations = 10;
    std::vector<int> task_counts{6, 8, 10, 12};
    std::size_t marl_budget = 400;
    std::vector<int> hidden{64, 64};
    /// Imitation of the built-in heuristic that produces the incumbent.
    TrainConfig pretrain{0.5, 3000};
    /// Further training of the transferred candidate on the online-learning labels.
    TrainConfig finetune{0.5, 3000};
    /// Deadline factor of the base scenarios.
    double deadline_factor = 1.1;
};

struct ExperimentConfig {
    int scenarios = 20;
    int events_per_scenario = 10;
    std::vector<ModelKind> models{ModelKind::mab, ModelKind::cb, ModelKind::marl};
    std::map<ModelKind, std::size_t> budgets{{ModelKind::mab, 1000}, {ModelKind::cb, 1000}, {ModelKind::marl, 2000}};
    ProfileKind profile = ProfileKind::makespan;
    std::map<ModelKind, double> decay_overrides;
    std::vector<int> task_counts{5, 10, 15, 20, 25};
    int es_min = 3;
    int es_max = 5;
    ScenarioConfig scenario;
    TriggerMode trigger = TriggerMode::continuous;
    std::size_t arm_cap = 1024;
    Tick recovery_delay = 0;
    SweepConfig sweep;
    RetrainConfig retrain;
    OnlineConfig online;
    std::uint64_t seed = 1;
    /// 0 = hardware concurrency.
    int threads = 0;
    bool write_schedules = true;
    std::filesystem::path output_dir = "out";

    /// Throws ConfigError.
    void validate() const;
};

/// Throws ConfigError on unknown keys or bad values.
ExperimentConfig experiment_config_from_json(const Json &j);
Json to_json(const ExperimentConfig &cfg);
/// Applies TTMS_SEED when set. Throws ConfigError on an unparsable value.
void apply_seed_override(ExperimentConfig &cfg);

struct ExperimentSummary {
    std::size_t cells = 0;
    std::size_t failed_cells = 0;
    std::size_t skipped_cells = 0;
    std::vector<std::string> files;
};

/// Runs every (scenario, event, model) cell and writes CSVs plus manifest.json to cfg.output_dir.
/// Per-cell failures are recorded in the manifest; the run continues.
ExperimentSummary run_experiment(const ExperimentConfig &cfg);

struct RetrainRow {
    int base = 0;
    int variation = 0;
    bool held_out = false;
    Tick deadline = 0;
    double pre_makespan = 0.0;
    /// Best makespan found by MARL (training rows only); NaN when not searched or infeasible.
    double marl_makespan = 0.0;
    double post_makespan = 0.0;
    std::string status;
};

struct RetrainReport {
    std::vector<RetrainRow> rows;
    CommitDecision decision;
    bool trained = false;
    std::size_t no_feasible = 0;
    std::size_t training_samples = 0;
    double heldout_pre_mean = 0.0;
    double heldout_post_mean = 0.0;
    double heldout_pre_rate = 0.0;
    double heldout_post_rate = 0.0;
    /// Sanity flag: no (base, variation) pair is both trained on and held out.
    bool disjoint = true;
    Mlp committed_model;
};

/// Enhancement training: incumbent inference, MARL labels on the training split, candidate trained
/// from the transferred incumbent, commit_if_improved on the held-out split.
RetrainReport run_retraining(const ExperimentConfig &cfg);
/// Writes retrain.csv, retrain_summary.json and the committed model (inference.tmlp) under `dir`.
void write_retraining(const RetrainReport &report, const std::filesystem::path &dir);
/// run_retraining + write_retraining.
RetrainReport run_retraining_to(const ExperimentConfig &cfg);

/// Parallel map over [0, n) with `threads` workers (0 = hardware concurrency). Results keep index order.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn &&fn);

} // namespace ttms

#include "ttms/detail/parallel.hpp"
