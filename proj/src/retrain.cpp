#include "ttms/experiment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "ttms/errors.hpp"
#include "ttms/reconstructor.hpp"

namespace ttms {

namespace {

struct Instance {
    int base = 0;
    int variation = 0;
    bool held_out = false;
    ValidationInstance problem;
    Eigen::VectorXd features;
};

Sample assignment_sample(const Instance &in, const Assignment &assignment, const FeatureLayout &layout) {
    return {in.features, spatial_target(assignment, in.problem.am, in.problem.pm, layout),
            spatial_mask(in.problem.am, in.problem.pm, layout)};
}

double assignment_makespan(const ValidationInstance &in, const Assignment &assignment) {
    try {
        return static_cast<double>(reconstruct(in.am, in.pm, PriorityAssignment{b_level(in.am), assignment}).makespan);
    } catch (const Error &) {
        return 10.0 * static_cast<double>(in.am.deadline);
    }
}

double mean(const std::vector<double> &v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

RetrainReport run_retraining(const ExperimentConfig &cfg) {
    cfg.validate();
    const RetrainConfig &rc = cfg.retrain;
    const FeatureLayout layout;

    // Instances: every base scenario with `variations` independent context events.
    std::vector<std::vector<Instance>> per_base(static_cast<std::size_t>(rc.bases));
    const int counts = static_cast<int>(rc.task_counts.size());
    parallel_for(per_base.size(), cfg.threads, [&](std::size_t b) {
        ScenarioConfig sc = cfg.scenario;
        sc.n_tasks = rc.task_counts[b % static_cast<std::size_t>(counts)];
        sc.n_end_systems = cfg.es_min + (static_cast<int>(b) / counts) % (cfg.es_max - cfg.es_min + 1);
        sc.deadline_factor = rc.deadline_factor;
        sc.seed = mix_seed(cfg.seed, 5000 + b);
        try {
            const Scenario base = generate_scenario(sc);
            const ContextModel cm = inject_events(base.am, base.pm, rc.variations, mix_seed(cfg.seed, 6000 + b));
            Rng rng(mix_seed(cfg.seed, 7000 + b));
            const std::size_t held = uniform_index(rng, cm.events.size());
            for (std::size_t v = 0; v < cm.events.size(); ++v) {
                Instance in;
                in.base = static_cast<int>(b);
                in.variation = static_cast<int>(v);
                in.held_out = v == held;
                const auto [am, pm] = apply_event(base.am, base.pm, cm.events[v]);
                in.problem = {am, pm, cm.events[v]};
                in.features = context_features(am, pm, cm.events[v], {}, layout);
                per_base[b].push_back(std::move(in));
            }
        } catch (const Error &) {
        }
    });
    std::vector<Instance> instances;
    for (auto &v : per_base)
        for (auto &in : v) instances.push_back(std::move(in));

    // Incumbent: the deployed inference, trained to imitate the built-in heuristic on the training split.
    SpatialInference incumbent = SpatialInference::random(rc.hidden, layout, mix_seed(cfg.seed, 8000));
    {
        const HeuristicInference h;
        std::vector<Sample> imitation;
        for (const auto &in : instances)
            if (!in.held_out)
                imitation.push_back(assignment_sample(in, h.infer(in.problem.am, in.problem.pm, {}).spatial, layout));
        if (!imitation.empty()) incumbent.network() = train(incumbent.network(), imitation, rc.pretrain).net;
    }

    RetrainReport report;
    std::vector<double> pre_makespan(instances.size());
    parallel_for(instances.size(), cfg.threads,
                 [&](std::size_t i) { pre_makespan[i] = instance_makespan(incumbent, instances[i].problem); });
    bool any_miss = false;
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (pre_makespan[i] > static_cast<double>(instances[i].problem.am.deadline)) any_miss = true;
    if (!any_miss) {
        report.committed_model = incumbent.network();
        return report;
    }

    report.rows.resize(instances.size());
    std::vector<std::optional<Assignment>> found(instances.size());
    parallel_for(instances.size(), cfg.threads, [&](std::size_t i) {
        const Instance &in = instances[i];
        RetrainRow &row = report.rows[i];
        row.base = in.base;
        row.variation = in.variation;
        row.held_out = in.held_out;
        row.deadline = in.problem.am.deadline;
        row.pre_makespan = pre_makespan[i];
        row.marl_makespan = std::numeric_limits<double>::quiet_NaN();
        row.status = in.held_out ? "held_out" : "train";
        if (in.held_out) return;

        const SchedulingEnvironment env(in.problem.am, in.problem.pm, {ProfileKind::makespan, in.problem.am.deadline},
                                        FrozenPrefix{0, {}, {}, {}, {}}, in.problem.event,
                                        {cfg.arm_cap, {}, layout});
        OnlineConfig oc = cfg.online;
        oc.marl_predictor = false;
        const auto res = run_online_learning(env, ModelKind::marl, rc.marl_budget, oc,
                                             mix_seed(cfg.seed, 9000 + i));
        if (!res.catalog.has_schedule()) {
            row.status = "no_feasible";
            return;
        }
        row.marl_makespan = static_cast<double>(res.catalog.best_schedule->makespan);
        found[i] = res.catalog.best_assignment;
    });

    // Label: the best placement for this instance among the solutions found on every training
    // variation of the same base, or the incumbent's own placement if none of them beats it.
    // Sharing solutions within a base keeps labels consistent across similar contexts.
    std::vector<std::optional<Assignment>> labels(instances.size());
    parallel_for(instances.size(), cfg.threads, [&](std::size_t i) {
        if (!found[i]) return;
        const Instance &in = instances[i];
        RetrainRow &row = report.rows[i];
        Assignment best = *found[i];
        double best_makespan = row.marl_makespan;
        for (std::size_t j = 0; j < instances.size(); ++j) {
            if (j == i || !found[j] || instances[j].base != in.base) continue;
            const double m = assignment_makespan(in.problem, *found[j]);
            if (m < best_makespan) {
                best = *found[j];
                best_makespan = m;
                row.status = "train_pooled_label";
            }
        }
        if (best_makespan > row.pre_makespan) {
            best = incumbent.infer(in.problem.am, in.problem.pm, ContextModel{{in.problem.event}}).spatial;
            row.status = "train_incumbent_label";
        }
        labels[i] = std::move(best);
    });

    std::vector<ValidationInstance> validation;
    std::vector<Sample> samples;
    std::set<std::pair<int, int>> trained_on, held;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto &row = report.rows[i];
        if (row.status == "no_feasible") ++report.no_feasible;
        if (instances[i].held_out) {
            validation.push_back(instances[i].problem);
            held.insert({row.base, row.variation});
        } else if (labels[i]) {
            samples.push_back(assignment_sample(instances[i], *labels[i], layout));
            trained_on.insert({row.base, row.variation});
        }
    }
    for (const auto &k : held)
        if (trained_on.contains(k)) report.disjoint = false;
    report.training_samples = samples.size();

    SpatialInference chosen = incumbent;
    if (!samples.empty() && !validation.empty()) {
        SpatialInference candidate = incumbent;
        candidate.network() = transfer_weights(incumbent.network(), candidate.network());
        candidate.network() = train(candidate.network(), samples, rc.finetune).net;
        const auto result = commit_if_improved(candidate, incumbent, validation);
        report.decision = result.decision;
        report.trained = true;
        chosen = result.chosen;
    } else {
        report.rows.clear();
        report.training_samples = 0;
    }

    std::vector<double> pre, post;
    std::size_t pre_hit = 0, post_hit = 0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        auto &row = report.rows[i];
        row.post_makespan = instance_makespan(chosen, instances[i].problem);
        if (!row.held_out) continue;
        pre.push_back(row.pre_makespan);
        post.push_back(row.post_makespan);
        pre_hit += row.pre_makespan <= static_cast<double>(row.deadline);
        post_hit += row.post_makespan <= static_cast<double>(row.deadline);
    }
    report.heldout_pre_mean = mean(pre);
    report.heldout_post_mean = mean(post);
    if (!pre.empty()) {
        report.heldout_pre_rate = static_cast<double>(pre_hit) / static_cast<double>(pre.size());
        report.heldout_post_rate = static_cast<double>(post_hit) / static_cast<double>(post.size());
    }
    report.committed_model = chosen.network();
    return report;
}

void write_retraining(const RetrainReport &report, const std::filesystem::path &dir) {
    std::string csv = "base,variation,split,deadline,pre_makespan,marl_makespan,post_makespan,status\n";
    auto num = [](double v) {
        if (std::isnan(v)) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const auto &r : report.rows)
        csv += std::to_string(r.base) + "," + std::to_string(r.variation) + "," + (r.held_out ? "test" : "train") + "," +
               std::to_string(r.deadline) + "," + num(r.pre_makespan) + "," + num(r.marl_makespan) + "," +
               num(r.post_makespan) + "," + r.status + "\n";
    write_text_file(dir / "retrain.csv", csv);
    write_json_file(dir / "retrain_summary.json",
                    Json{{"kind", "retrain"},
                         {"csv_schema_version", csv_schema_version},
                         {"trained", report.trained},
                         {"committed", report.decision.committed},
                         {"candidate_metric", report.decision.candidate_metric},
                         {"incumbent_metric", report.decision.incumbent_metric},
                         {"training_samples", report.training_samples},
                         {"no_feasible", report.no_feasible},
                         {"disjoint_split", report.disjoint},
                         {"heldout_pre_mean_makespan", report.heldout_pre_mean},
                         {"heldout_post_mean_makespan", report.heldout_post_mean},
                         {"heldout_pre_deadline_rate", report.heldout_pre_rate},
                         {"heldout_post_deadline_rate", report.heldout_post_rate},
                         {"files", {{{"name", "retrain.csv"},
                                     {"columns", {"base", "variation", "split", "deadline", "pre_makespan",
                                                  "marl_makespan", "post_makespan", "status"}}},
                                    {{"name", "inference.tmlp"}}}}});
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "inference.tmlp", std::ios::binary);
    if (!out) throw FormatError("cannot write " + (dir / "inference.tmlp").string());
    save_mlp(out, report.committed_model);
}

RetrainReport run_retraining_to(const ExperimentConfig &cfg) {
    RetrainReport report = run_retraining(cfg);
    write_retraining(report, cfg.output_dir);
    return report;
}

} // namespace ttms
