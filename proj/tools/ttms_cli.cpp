#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "ttms/errors.hpp"
#include "ttms/experiment.hpp"
#include "ttms/report.hpp"

namespace {

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

ttms::ExperimentConfig load_config(const std::string &path, const std::string &out) {
    ttms::ExperimentConfig cfg;
    try {
        cfg = ttms::experiment_config_from_json(ttms::read_json_file(path));
    } catch (const ttms::FormatError &e) {
        throw ttms::ConfigError(e.what());
    }
    cfg.output_dir = out;
    ttms::apply_seed_override(cfg);
    return cfg;
}

std::uint64_t seed_or_env(std::uint64_t seed) {
    ttms::ExperimentConfig probe;
    probe.seed = seed;
    ttms::apply_seed_override(probe);
    return probe.seed;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Time-triggered metascheduler with online learning"};
    app.require_subcommand(1);

    ttms::ScenarioConfig gen_cfg;
    std::string gen_out;
    auto *gen = app.add_subcommand("gen", "Generate a random scenario (application + platform model)");
    gen->add_option("--tasks", gen_cfg.n_tasks, "Number of tasks")->required();
    gen->add_option("--es", gen_cfg.n_end_systems, "Number of end systems")->required();
    gen->add_option("--routers", gen_cfg.n_routers, "Number of routers");
    gen->add_option("--density", gen_cfg.edge_density, "Edge density");
    gen->add_option("--message-density", gen_cfg.message_density, "Fraction of edges carried as messages");
    gen->add_option("--deadline-factor", gen_cfg.deadline_factor, "Deadline over heuristic makespan");
    gen->add_option("--seed", gen_cfg.seed, "Seed");
    gen->add_option("--out", gen_out, "Output scenario JSON")->required();

    std::string inj_scenario, inj_out;
    int inj_events = 10;
    std::uint64_t inj_seed = 1;
    auto *inject = app.add_subcommand("inject", "Draw a context model for a scenario");
    inject->add_option("--scenario", inj_scenario, "Scenario JSON")->required();
    inject->add_option("--events", inj_events, "Number of events");
    inject->add_option("--seed", inj_seed, "Seed");
    inject->add_option("--out", inj_out, "Output context model JSON")->required();

    std::string run_config, run_out;
    auto *run = app.add_subcommand("run", "Run the online-learning experiment grid");
    run->add_option("--config", run_config, "Experiment config JSON")->required();
    run->add_option("--out", run_out, "Output directory")->required();

    std::string re_config, re_out;
    auto *retrain = app.add_subcommand("retrain", "Run the enhancement-training pipeline");
    retrain->add_option("--config", re_config, "Experiment config JSON")->required();
    retrain->add_option("--out", re_out, "Output directory")->required();

    std::string rep_in;
    bool rep_plot = false;
    auto *report = app.add_subcommand("report", "Summarise an output directory");
    report->add_option("--in", rep_in, "Output directory of run or retrain")->required();
    report->add_flag("--plot", rep_plot, "Also write SVG charts to <dir>/plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : exit_config;
    }

    try {
        if (*gen) {
            gen_cfg.seed = seed_or_env(gen_cfg.seed);
            ttms::write_json_file(gen_out, ttms::scenario_to_json(ttms::generate_scenario(gen_cfg)));
        } else if (*inject) {
            ttms::Scenario sc;
            try {
                sc = ttms::scenario_from_json(ttms::read_json_file(inj_scenario));
            } catch (const ttms::FormatError &e) {
                throw ttms::ConfigError(e.what());
            }
            const auto cm = ttms::inject_events(sc.am, sc.pm, inj_events, seed_or_env(inj_seed));
            ttms::write_json_file(inj_out, ttms::to_json(cm));
        } else if (*run) {
            const auto cfg = load_config(run_config, run_out);
            const auto s = ttms::run_experiment(cfg);
            std::cout << "cells: " << s.cells << ", failed: " << s.failed_cells << ", not triggered: " << s.skipped_cells
                      << "\n";
        } else if (*retrain) {
            const auto cfg = load_config(re_config, re_out);
            const auto r = ttms::run_retraining_to(cfg);
            std::cout << "trained: " << (r.trained ? "yes" : "no") << ", committed: " << (r.decision.committed ? "yes" : "no")
                      << ", held-out mean makespan " << r.heldout_pre_mean << " -> " << r.heldout_post_mean
                      << ", deadline rate " << r.heldout_pre_rate << " -> " << r.heldout_post_rate << "\n";
        } else if (*report) {
            std::cout << ttms::write_report(rep_in, rep_plot);
        }
    } catch (const ttms::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return 0;
}
