#include "ttms/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "ttms/errors.hpp"
#include "ttms/msg_graph.hpp"
#include "ttms/reconstructor.hpp"

namespace ttms {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string pad(int v, int width) {
    std::string s = std::to_string(v);
    return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

const std::set<std::string> &config_keys() {
    static const std::set<std::string> keys{
        "scenarios", "events_per_scenario", "models",     "budgets", "episode_budget", "profile",
        "decay",     "task_counts",         "end_systems", "routers", "scenario",       "trigger",
        "arm_cap",   "recovery_delay",      "epsilon_sweep", "retrain", "online",       "seed",
        "threads",   "write_schedules",     "output_dir"};
    return keys;
}

void reject_unknown(const Json &j, const std::set<std::string> &keys, const std::string &where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto &[k, v] : j.items())
        if (!keys.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <typename T>
void read(const Json &j, const char *key, T &out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

void read_train(const Json &j, const char *key, TrainConfig &cfg) {
    if (!j.contains(key)) return;
    const Json &t = j.at(key);
    reject_unknown(t, {"learning_rate", "iterations"}, key);
    read(t, "learning_rate", cfg.learning_rate);
    read(t, "iterations", cfg.iterations);
}

Json train_json(const TrainConfig &c) { return Json{{"learning_rate", c.learning_rate}, {"iterations", c.iterations}}; }

std::string trigger_name(TriggerMode m) { return m == TriggerMode::on_miss ? "on_miss" : "continuous"; }

} // namespace

void ExperimentConfig::validate() const {
    if (scenarios < 1) throw ConfigError("scenarios must be at least 1");
    if (events_per_scenario < 1) throw ConfigError("events_per_scenario must be at least 1");
    if (models.empty()) throw ConfigError("at least one model kind is required");
    if (task_counts.empty()) throw ConfigError("task_counts must not be empty");
    for (int t : task_counts)
        if (t < 1) throw ConfigError("task counts must be positive");
    if (es_min < 1 || es_max < es_min) throw ConfigError("end_systems range must satisfy 1 <= min <= max");
    for (const auto &[m, d] : decay_overrides)
        if (!(d > 0.0 && d < 1.0)) throw ConfigError("decay for " + to_string(m) + " must be in (0, 1)");
    for (double d : sweep.decays)
        if (!(d > 0.0 && d < 1.0)) throw ConfigError("sweep decays must be in (0, 1)");
    if (sweep.cells < 0) throw ConfigError("epsilon_sweep.cells must be non-negative");
    if (retrain.bases < 1 || retrain.variations < 2) throw ConfigError("retrain needs >= 1 base and >= 2 variations");
    if (retrain.task_counts.empty()) throw ConfigError("retrain.task_counts must not be empty");
    if (threads < 0) throw ConfigError("threads must be non-negative");
    if (recovery_delay < 0) throw ConfigError("recovery_delay must be non-negative");
    ScenarioConfig probe = scenario;
    probe.n_tasks = *std::max_element(task_counts.begin(), task_counts.end());
    probe.n_end_systems = es_max;
    probe.validate();
}

ExperimentConfig experiment_config_from_json(const Json &j) {
    reject_unknown(j, config_keys(), "experiment config");
    ExperimentConfig cfg;
    read(j, "scenarios", cfg.scenarios);
    read(j, "events_per_scenario", cfg.events_per_scenario);
    if (j.contains("models")) {
        std::vector<std::string> names;
        read(j, "models", names);
        cfg.models.clear();
        for (const auto &n : names) cfg.models.push_back(parse_model_kind(n));
    }
    if (j.contains("episode_budget")) {
        std::size_t b = 0;
        read(j, "episode_budget", b);
        for (auto m : {ModelKind::mab, ModelKind::cb, ModelKind::marl}) cfg.budgets[m] = b;
    }
    if (j.contains("budgets")) {
        std::map<std::string, std::size_t> b;
        read(j, "budgets", b);
        for (const auto &[k, v] : b) cfg.budgets[parse_model_kind(k)] = v;
    }
    if (j.contains("profile")) {
        std::string p;
        read(j, "profile", p);
        cfg.profile = parse_profile_kind(p);
    }
    if (j.contains("decay")) {
        std::map<std::string, double> d;
        read(j, "decay", d);
        for (const auto &[k, v] : d) cfg.decay_overrides[parse_model_kind(k)] = v;
    }
    read(j, "task_counts", cfg.task_counts);
    if (j.contains("end_systems")) {
        std::vector<int> es;
        read(j, "end_systems", es);
        if (es.size() == 1) cfg.es_min = cfg.es_max = es[0];
        else if (es.size() == 2) cfg.es_min = es[0], cfg.es_max = es[1];
        else throw ConfigError("end_systems must be [n] or [min, max]");
    }
    read(j, "routers", cfg.scenario.n_routers);
    if (j.contains("scenario")) {
        const Json &s = j.at("scenario");
        reject_unknown(s,
                       {"edge_density", "wcet_min", "wcet_max", "message_density", "message_size_min",
                        "message_size_max", "deadline_factor"},
                       "scenario");
        read(s, "edge_density", cfg.scenario.edge_density);
        read(s, "wcet_min", cfg.scenario.wcet_min);
        read(s, "wcet_max", cfg.scenario.wcet_max);
        read(s, "message_density", cfg.scenario.message_density);
        read(s, "message_size_min", cfg.scenario.message_size_min);
        read(s, "message_size_max", cfg.scenario.message_size_max);
        read(s, "deadline_factor", cfg.scenario.deadline_factor);
    }
    if (j.contains("trigger")) {
        std::string t;
        read(j, "trigger", t);
        if (t == "on_miss") cfg.trigger = TriggerMode::on_miss;
        else if (t == "continuous") cfg.trigger = TriggerMode::continuous;
        else throw ConfigError("trigger must be on_miss or continuous");
    }
    read(j, "arm_cap", cfg.arm_cap);
    read(j, "recovery_delay", cfg.recovery_delay);
    if (j.contains("epsilon_sweep")) {
        const Json &s = j.at("epsilon_sweep");
        reject_unknown(s, {"decays", "cells", "episodes"}, "epsilon_sweep");
        read(s, "decays", cfg.sweep.decays);
        read(s, "cells", cfg.sweep.cells);
        read(s, "episodes", cfg.sweep.episodes);
    }
    if (j.contains("retrain")) {
        const Json &r = j.at("retrain");
        reject_unknown(r,
                       {"bases", "variations", "task_counts", "marl_budget", "hidden", "pretrain", "finetune",
                        "deadline_factor"},
                       "retrain");
        read(r, "bases", cfg.retrain.bases);
        read(r, "variations", cfg.retrain.variations);
        read(r, "task_counts", cfg.retrain.task_counts);
        read(r, "marl_budget", cfg.retrain.marl_budget);
        read(r, "hidden", cfg.retrain.hidden);
        read_train(r, "pretrain", cfg.retrain.pretrain);
        read_train(r, "finetune", cfg.retrain.finetune);
        read(r, "deadline_factor", cfg.retrain.deadline_factor);
    }
    if (j.contains("online")) {
        const Json &o = j.at("online");
        reject_unknown(o,
                       {"learning_rate", "cb_hidden", "cb_train", "marl_hidden", "marl_train", "train_every",
                        "window", "marl_predictor"},
                       "online");
        if (o.contains("learning_rate")) {
            double a = 0;
            read(o, "learning_rate", a);
            cfg.online.learning_rate = a;
        }
        read(o, "cb_hidden", cfg.online.cb_hidden);
        read_train(o, "cb_train", cfg.online.cb_train);
        read(o, "marl_hidden", cfg.online.marl_hidden);
        read_train(o, "marl_train", cfg.online.marl_train);
        read(o, "train_every", cfg.online.train_every);
        read(o, "window", cfg.online.window);
        read(o, "marl_predictor", cfg.online.marl_predictor);
    }
    read(j, "seed", cfg.seed);
    read(j, "threads", cfg.threads);
    read(j, "write_schedules", cfg.write_schedules);
    if (j.contains("output_dir")) {
        std::string d;
        read(j, "output_dir", d);
        cfg.output_dir = d;
    }
    cfg.validate();
    return cfg;
}

Json to_json(const ExperimentConfig &cfg) {
    Json models = Json::array(), budgets = Json::object(), decay = Json::object();
    for (auto m : cfg.models) models.push_back(to_string(m));
    for (const auto &[m, b] : cfg.budgets) budgets[to_string(m)] = b;
    for (const auto &[m, d] : cfg.decay_overrides) decay[to_string(m)] = d;
    Json online{{"cb_hidden", cfg.online.cb_hidden},
                {"cb_train", train_json(cfg.online.cb_train)},
                {"marl_hidden", cfg.online.marl_hidden},
                {"marl_train", train_json(cfg.online.marl_train)},
                {"train_every", cfg.online.train_every},
                {"window", cfg.online.window},
                {"marl_predictor", cfg.online.marl_predictor}};
    if (cfg.online.learning_rate) online["learning_rate"] = *cfg.online.learning_rate;
    return Json{{"scenarios", cfg.scenarios},
                {"events_per_scenario", cfg.events_per_scenario},
                {"models", models},
                {"budgets", budgets},
                {"profile", to_string(cfg.profile)},
                {"decay", decay},
                {"task_counts", cfg.task_counts},
                {"end_systems", {cfg.es_min, cfg.es_max}},
                {"routers", cfg.scenario.n_routers},
                {"scenario",
                 {{"edge_density", cfg.scenario.edge_density},
                  {"wcet_min", cfg.scenario.wcet_min},
                  {"wcet_max", cfg.scenario.wcet_max},
                  {"message_density", cfg.scenario.message_density},
                  {"message_size_min", cfg.scenario.message_size_min},
                  {"message_size_max", cfg.scenario.message_size_max},
                  {"deadline_factor", cfg.scenario.deadline_factor}}},
                {"trigger", trigger_name(cfg.trigger)},
                {"arm_cap", cfg.arm_cap},
                {"recovery_delay", cfg.recovery_delay},
                {"epsilon_sweep", {{"decays", cfg.sweep.decays}, {"cells", cfg.sweep.cells}, {"episodes", cfg.sweep.episodes}}},
                {"retrain",
                 {{"bases", cfg.retrain.bases},
                  {"variations", cfg.retrain.variations},
                  {"task_counts", cfg.retrain.task_counts},
                  {"marl_budget", cfg.retrain.marl_budget},
                  {"hidden", cfg.retrain.hidden},
                  {"pretrain", train_json(cfg.retrain.pretrain)},
                  {"finetune", train_json(cfg.retrain.finetune)},
                  {"deadline_factor", cfg.retrain.deadline_factor}}},
                {"online", online},
                {"seed", cfg.seed},
                {"threads", cfg.threads},
                {"write_schedules", cfg.write_schedules}};
}

void apply_seed_override(ExperimentConfig &cfg) {
    const char *env = std::getenv("TTMS_SEED");
    if (env == nullptr || *env == '\0') return;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used, 0);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        cfg.seed = v;
    } catch (const std::exception &) {
        throw ConfigError(std::string("TTMS_SEED is not an unsigned integer: '") + env + "'");
    }
}

namespace {

struct PreparedScenario {
    int index = 0;
    Scenario scenario;
    Schedule root;
    ContextModel cm;
    std::string error;
};

struct Cell {
    int scenario = 0;
    int event = 0;
    ModelKind model = ModelKind::mab;
};

struct CellResult {
    bool ok = false;
    bool triggered = false;
    std::string error;
    double baseline_reward = 0.0;
    Tick deadline = 0;
    OnlineResult online;
    AppModel am;
    PlatformModel pm;
};

struct EventContext {
    AppModel am;
    PlatformModel pm;
    FrozenPrefix prefix;
    EvaluationReport baseline;
    bool baseline_feasible = false;
};

EventContext prepare_event(const PreparedScenario &ps, const ContextEvent &ev, const ExperimentConfig &cfg) {
    EventContext ctx;
    std::tie(ctx.am, ctx.pm) = apply_event(ps.scenario.am, ps.scenario.pm, ev);
    ctx.prefix = fix_past(ps.root, ev.timestamp, ctx.am, ctx.pm);
    const EvaluationProfile profile{cfg.profile, ctx.am.deadline};
    try {
        const HeuristicInference h;
        const Schedule s = reconstruct(ctx.am, ctx.pm, infer_priorities(h, ctx.am, ctx.pm, ContextModel{{ev}}),
                                       ctx.prefix, {cfg.recovery_delay});
        ctx.baseline = evaluate(s, ctx.am, ctx.pm, profile);
        ctx.baseline_feasible = true;
    } catch (const Error &) {
        ctx.baseline.reward = penalty_reward(profile);
        ctx.baseline.deadline_met = false;
    }
    return ctx;
}

OnlineConfig online_for(const ExperimentConfig &cfg, ModelKind m) {
    OnlineConfig oc = cfg.online;
    if (const auto it = cfg.decay_overrides.find(m); it != cfg.decay_overrides.end()) oc.decay = it->second;
    return oc;
}

std::uint64_t cell_seed(std::uint64_t master, int scenario, int event, int stream) {
    return mix_seed(mix_seed(master, static_cast<std::uint64_t>(scenario)),
                    static_cast<std::uint64_t>(event) * 16 + static_cast<std::uint64_t>(stream));
}

std::vector<PreparedScenario> prepare_scenarios(const ExperimentConfig &cfg) {
    std::vector<PreparedScenario> out(static_cast<std::size_t>(cfg.scenarios));
    const int counts = static_cast<int>(cfg.task_counts.size());
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
        PreparedScenario &ps = out[i];
        ps.index = static_cast<int>(i);
        ScenarioConfig sc = cfg.scenario;
        sc.n_tasks = cfg.task_counts[i % static_cast<std::size_t>(counts)];
        sc.n_end_systems = cfg.es_min + (static_cast<int>(i) / counts) % (cfg.es_max - cfg.es_min + 1);
        sc.seed = mix_seed(cfg.seed, 1000 + i);
        try {
            ps.scenario = generate_scenario(sc);
            const HeuristicInference h;
            ps.root = reconstruct(ps.scenario.am, ps.scenario.pm, infer_priorities(h, ps.scenario.am, ps.scenario.pm));
            ps.cm = inject_events(ps.scenario.am, ps.scenario.pm, cfg.events_per_scenario, mix_seed(cfg.seed, 2000 + i));
        } catch (const Error &e) {
            ps.error = e.what();
        }
    });
    return out;
}

std::string csv_join(const std::vector<std::string> &cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
    return s + "\n";
}

struct CsvFile {
    CsvFile(std::string name, std::vector<std::string> columns, bool deterministic = true)
        : name(std::move(name)), columns(std::move(columns)), deterministic(deterministic) {}
    std::string name;
    std::vector<std::string> columns;
    bool deterministic;
    std::string body;
};

std::int64_t median(std::vector<std::int64_t> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

} // namespace

ExperimentSummary run_experiment(const ExperimentConfig &cfg) {
    cfg.validate();
    const auto scenarios = prepare_scenarios(cfg);

    std::vector<Cell> cells;
    for (const auto &ps : scenarios) {
        if (!ps.error.empty()) continue;
        for (int e = 0; e < static_cast<int>(ps.cm.events.size()); ++e)
            for (auto m : cfg.models) cells.push_back({ps.index, e, m});
    }

    std::vector<CellResult> results(cells.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        const Cell &c = cells[i];
        CellResult &r = results[i];
        const auto &ps = scenarios[static_cast<std::size_t>(c.scenario)];
        const ContextEvent &ev = ps.cm.events[static_cast<std::size_t>(c.event)];
        try {
            EventContext ctx = prepare_event(ps, ev, cfg);
            r.deadline = ctx.am.deadline;
            r.baseline_reward = ctx.baseline.reward;
            r.triggered = check_trigger(ctx.baseline, cfg.trigger);
            r.am = ctx.am;
            r.pm = ctx.pm;
            if (r.triggered) {
                const SchedulingEnvironment env(ctx.am, ctx.pm, {cfg.profile, ctx.am.deadline}, ctx.prefix, ev,
                                                {cfg.arm_cap, {cfg.recovery_delay}, {}});
                const auto budget = cfg.budgets.contains(c.model) ? cfg.budgets.at(c.model) : std::size_t{1000};
                r.online = run_online_learning(env, c.model, budget, online_for(cfg, c.model),
                                               cell_seed(cfg.seed, c.scenario, c.event, static_cast<int>(c.model)));
            }
            r.ok = true;
        } catch (const std::exception &e) {
            r.error = e.what();
        }
    });

    // Epsilon sweep over the leading (scenario, event) pairs with MAB.
    std::vector<std::pair<int, int>> sweep_cells;
    for (const auto &ps : scenarios) {
        if (!ps.error.empty()) continue;
        for (int e = 0; e < static_cast<int>(ps.cm.events.size()) && static_cast<int>(sweep_cells.size()) < cfg.sweep.cells; ++e)
            sweep_cells.emplace_back(ps.index, e);
    }
    struct SweepResult {
        bool ok = false;
        double max_reward = 0, mean_reward = 0, final_epsilon = 0;
        int tasks = 0;
    };
    const std::size_t n_decays = cfg.sweep.decays.size();
    std::vector<SweepResult> sweep(sweep_cells.size() * n_decays);
    parallel_for(sweep.size(), cfg.threads, [&](std::size_t i) {
        const auto [si, ei] = sweep_cells[i / n_decays];
        const double decay = cfg.sweep.decays[i % n_decays];
        const auto &ps = scenarios[static_cast<std::size_t>(si)];
        const ContextEvent &ev = ps.cm.events[static_cast<std::size_t>(ei)];
        try {
            EventContext ctx = prepare_event(ps, ev, cfg);
            const SchedulingEnvironment env(ctx.am, ctx.pm, {cfg.profile, ctx.am.deadline}, ctx.prefix, ev,
                                            {cfg.arm_cap, {cfg.recovery_delay}, {}});
            OnlineConfig oc = cfg.online;
            oc.decay = decay;
            const auto res = run_online_learning(env, ModelKind::mab, cfg.sweep.episodes, oc,
                                                 cell_seed(cfg.seed, si, ei, 8));
            SweepResult &out = sweep[i];
            out.ok = !res.trace.empty();
            out.tasks = static_cast<int>(ctx.am.tasks.size());
            if (out.ok) {
                out.max_reward = *res.catalog.best_reward;
                double sum = 0;
                for (const auto &rec : res.trace) sum += rec.reward;
                out.mean_reward = sum / static_cast<double>(res.trace.size());
                out.final_epsilon = res.trace.back().epsilon;
            }
        } catch (const Error &) {
        }
    });

    // Serial aggregation.
    const auto &dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    CsvFile events{"events.csv", {"scenario", "event", "word", "kind", "value", "affected_task", "timestamp", "hw_id"}};
    CsvFile traces{"traces.csv",
                   {"scenario", "event", "model", "tasks", "episode", "epsilon", "reward", "best_reward", "prediction_error"}};
    CsvFile maxr{"max_reward.csv",
                 {"scenario", "event", "model", "tasks", "end_systems", "deadline", "baseline_reward", "max_reward",
                  "best_makespan", "deadline_met", "status"}};
    CsvFile sweepf{"epsilon_sweep.csv", {"decay", "scenario", "event", "tasks", "max_reward", "mean_reward", "final_epsilon"}};
    CsvFile timing{"decision_time.csv", {"scenario", "event", "model", "tasks", "samples", "median_ns"}, false};

    for (const auto &ps : scenarios)
        for (std::size_t e = 0; e < ps.cm.events.size(); ++e) {
            const auto &ev = ps.cm.events[e];
            events.body += csv_join({std::to_string(ps.index), std::to_string(e), to_hex(encode_context_word(ev)),
                                     to_string(ev.kind), std::to_string(ev.value), std::to_string(ev.affected_task),
                                     std::to_string(ev.timestamp), std::to_string(ev.hw_id)});
        }

    ExperimentSummary summary;
    summary.cells = cells.size();
    Json failures = Json::array();
    for (const auto &ps : scenarios)
        if (!ps.error.empty()) failures.push_back(Json{{"scenario", ps.index}, {"error", ps.error}});

    std::ostringstream trace_body;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell &c = cells[i];
        const CellResult &r = results[i];
        const auto &ps = scenarios[static_cast<std::size_t>(c.scenario)];
        const std::string tasks = std::to_string(ps.scenario.am.tasks.size());
        const std::string es = std::to_string(ps.scenario.pm.end_systems().size());
        const std::string key = std::to_string(c.scenario) + "," + std::to_string(c.event) + "," + to_string(c.model);
        if (!r.ok) {
            ++summary.failed_cells;
            failures.push_back(Json{{"scenario", c.scenario}, {"event", c.event}, {"model", to_string(c.model)}, {"error", r.error}});
            maxr.body += csv_join({key, tasks, es, "", "", "", "", "", "failed"});
            continue;
        }
        if (!r.triggered) {
            ++summary.skipped_cells;
            maxr.body += csv_join({key, tasks, es, std::to_string(r.deadline), num(r.baseline_reward), "", "", "", "not_triggered"});
            continue;
        }
        std::vector<std::int64_t> ns;
        for (std::size_t k = 0; k < r.online.trace.size(); ++k) {
            const auto &rec = r.online.trace[k];
            trace_body << key << ',' << tasks << ',' << k << ',' << num(rec.epsilon) << ',' << num(rec.reward) << ','
                       << num(rec.best_reward) << ',' << num(rec.prediction_error) << '\n';
            ns.push_back(rec.decision_ns);
        }
        timing.body += csv_join({key, tasks, std::to_string(ns.size()), std::to_string(median(ns))});
        const auto &cat = r.online.catalog;
        const bool has = cat.has_schedule();
        maxr.body += csv_join({key, tasks, es, std::to_string(r.deadline), num(r.baseline_reward),
                               cat.best_reward ? num(*cat.best_reward) : "", has ? std::to_string(cat.best_schedule->makespan) : "",
                               has ? (cat.best_schedule->makespan <= r.deadline ? "1" : "0") : "", to_string(r.online.status)});
    }
    traces.body = trace_body.str();

    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const auto [si, ei] = sweep_cells[i / n_decays];
        if (!sweep[i].ok) continue;
        sweepf.body += csv_join({num(cfg.sweep.decays[i % n_decays]), std::to_string(si), std::to_string(ei),
                                 std::to_string(sweep[i].tasks), num(sweep[i].max_reward), num(sweep[i].mean_reward),
                                 num(sweep[i].final_epsilon)});
    }

    // Commit point: the best safe schedule per (scenario, event) across models joins that scenario's MSG.
    Json msg_summary = Json::array();
    std::map<int, std::map<int, std::size_t>> best_cell;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto &r = results[i];
        if (!r.ok || !r.triggered || !r.online.catalog.has_schedule()) continue;
        auto &slot = best_cell[cells[i].scenario];
        const auto it = slot.find(cells[i].event);
        if (it == slot.end() || *r.online.catalog.best_reward > *results[it->second].online.catalog.best_reward)
            slot[cells[i].event] = i;
    }
    for (const auto &ps : scenarios) {
        if (!ps.error.empty()) continue;
        MultiScheduleGraph g(ps.root, ps.scenario.am, ps.scenario.pm);
        Json rejected = Json::array();
        const auto found = best_cell.find(ps.index);
        if (found != best_cell.end())
            for (const auto &[e, ci] : found->second) {
                const auto &r = results[ci];
                const ContextEvent &ev = ps.cm.events[static_cast<std::size_t>(e)];
                try {
                    insert_discovered(g, g.root(), ev, *r.online.catalog.best_schedule, r.am, r.pm);
                    if (cfg.write_schedules) {
                        const std::string stem = "schedules/s" + pad(ps.index, 3) + "_e" + pad(e, 2);
                        write_text_file(dir / (stem + "_messages.csv"), message_table_csv(*r.online.catalog.best_schedule));
                        write_text_file(dir / (stem + "_tasks.csv"), task_table_csv(*r.online.catalog.best_schedule, r.am));
                    }
                } catch (const Error &err) {
                    rejected.push_back(Json{{"event", e}, {"word", to_hex(encode_context_word(ev))}, {"reason", err.what()}});
                }
            }
        if (cfg.write_schedules) write_json_file(dir / ("msg/s" + pad(ps.index, 3) + ".json"), to_json(g));
        msg_summary.push_back(Json{{"scenario", ps.index}, {"nodes", g.node_count()}, {"edges", g.edge_count()}, {"rejected", rejected}});
    }

    Json files = Json::array();
    for (CsvFile *f : {&events, &traces, &maxr, &sweepf, &timing}) {
        write_text_file(dir / f->name, csv_join(f->columns) + f->body);
        files.push_back(Json{{"name", f->name}, {"columns", f->columns}, {"deterministic", f->deterministic}});
        summary.files.push_back(f->name);
    }
    if (cfg.write_schedules)
        files.push_back(Json{{"name", "schedules/*_messages.csv"},
                             {"columns", {"Message ID", "Tx Task", "Rx Task", "Tx End System", "Rx End System", "Start Time", "End Time"}},
                             {"deterministic", true}});

    const Json manifest{{"kind", "experiment"},
                        {"csv_schema_version", csv_schema_version},
                        {"seed", cfg.seed},
                        {"config", to_json(cfg)},
                        {"files", files},
                        {"cells", summary.cells},
                        {"failed_cells", summary.failed_cells},
                        {"skipped_cells", summary.skipped_cells},
                        {"failures", failures},
                        {"msg", msg_summary}};
    write_json_file(dir / "manifest.json", manifest);
    return summary;
}

} // namespace ttms
