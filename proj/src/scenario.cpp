#include "ttms/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "ttms/bandits.hpp"
#include "ttms/errors.hpp"
#include "ttms/reconstructor.hpp"

namespace ttms {

namespace {

Tick draw_range(Rng &rng, Tick lo, Tick hi) {
    return lo + static_cast<Tick>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));
}

} // namespace

void ScenarioConfig::validate() const {
    if (n_tasks < 1 || n_tasks > 1024) throw ConfigError("n_tasks must be in [1, 1024]");
    if (n_end_systems < 1) throw ConfigError("n_end_systems must be at least 1");
    if (n_routers < 0) throw ConfigError("n_routers must be non-negative");
    if (n_routers == 0 && n_end_systems > 1) throw ConfigError("end systems without routers cannot be connected");
    if (!(edge_density >= 0.0 && edge_density <= 1.0)) throw ConfigError("edge_density must be in [0, 1]");
    if (!(message_density >= 0.0 && message_density <= 1.0)) throw ConfigError("message_density must be in [0, 1]");
    if (wcet_min < 1 || wcet_max < wcet_min) throw ConfigError("wcet range must satisfy 1 <= min <= max");
    if (message_size_min < 1 || message_size_max < message_size_min)
        throw ConfigError("message size range must satisfy 1 <= min <= max");
    if (!(deadline_factor >= 1.0)) throw ConfigError("deadline_factor must be at least 1");
    const int links = n_routers == 0 ? 0 : n_end_systems * (n_routers > 1 ? 2 : 1) + (n_routers - 1);
    if (n_end_systems + n_routers + links > 64)
        throw ConfigError("platform needs " + std::to_string(n_end_systems + n_routers + links) +
                          " hardware ids, more than 64");
}

Tick heuristic_makespan(const AppModel &am, const PlatformModel &pm) {
    const HeuristicInference h;
    return reconstruct(am, pm, infer_priorities(h, am, pm)).makespan;
}

Scenario generate_scenario(const ScenarioConfig &cfg) {
    cfg.validate();
    Rng rng(mix_seed(cfg.seed, 0x5ce));
    Scenario sc;

    const int layers = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(cfg.n_tasks)))));
    std::vector<std::vector<TaskId>> layer(static_cast<std::size_t>(layers));
    for (TaskId t = 0; t < cfg.n_tasks; ++t) {
        Task task;
        task.id = t;
        task.wcet = draw_range(rng, cfg.wcet_min, cfg.wcet_max);
        sc.am.tasks.emplace(t, task);
        // The first `layers` tasks seed one layer each so no layer is empty.
        const std::size_t l = t < layers ? static_cast<std::size_t>(t) : uniform_index(rng, layer.size());
        layer[l].push_back(t);
    }
    MsgId next_msg = 0;
    for (std::size_t l = 1; l < layer.size(); ++l)
        for (TaskId rx : layer[l])
            for (TaskId tx : layer[l - 1]) {
                if (uniform01(rng) >= cfg.edge_density) continue;
                if (uniform01(rng) < cfg.message_density) {
                    Message m;
                    m.id = next_msg++;
                    m.tx_task = tx;
                    m.rx_task = rx;
                    m.size = draw_range(rng, cfg.message_size_min, cfg.message_size_max);
                    sc.am.messages.emplace(m.id, m);
                } else {
                    sc.am.tasks.at(rx).predecessors.insert(tx);
                }
            }

    std::vector<std::pair<int, int>> links;
    const int es = cfg.n_end_systems, r = cfg.n_routers;
    for (int i = 0; i < es && r > 0; ++i) {
        links.emplace_back(i, es + i % r);
        if (r > 1) links.emplace_back(i, es + (i + 1) % r);
    }
    for (int k = 0; k + 1 < r; ++k) links.emplace_back(es + k, es + k + 1);
    sc.pm = PlatformModel::build(es, r, links);

    sc.am.deadline = 1;
    sc.am.validate();
    const Tick makespan = heuristic_makespan(sc.am, sc.pm);
    sc.am.deadline = std::max<Tick>(1, static_cast<Tick>(std::ceil(cfg.deadline_factor * static_cast<double>(makespan))));
    return sc;
}

bool platform_connected(const PlatformModel &pm) {
    const auto es = pm.end_systems(true);
    const Router router(pm);
    for (HwId a : es)
        for (HwId b : es)
            if (a != b && !router.route(a, b)) return false;
    return true;
}

ContextModel inject_events(const AppModel &am, const PlatformModel &pm, int n_events, std::uint64_t seed) {
    if (n_events < 0) throw ConfigError("n_events must be non-negative");
    ContextModel cm;
    if (n_events == 0) return cm;
    const Tick horizon = std::min<Tick>(heuristic_makespan(am, pm), 1023);
    if (horizon - 1 < n_events)
        throw HorizonTooShortError("horizon " + std::to_string(horizon) + " cannot hold " + std::to_string(n_events) +
                                   " strictly increasing timestamps");
    Rng rng(mix_seed(seed, 0xe7));

    // Distinct timestamps in [1, horizon) by partial Fisher-Yates.
    std::vector<Tick> pool;
    for (Tick t = 1; t < horizon; ++t) pool.push_back(t);
    for (int i = 0; i < n_events; ++i)
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(i) + uniform_index(rng, pool.size() - static_cast<std::size_t>(i))]);
    std::vector<Tick> times(pool.begin(), pool.begin() + n_events);
    std::sort(times.begin(), times.end());

    std::vector<TaskId> tasks;
    for (const auto &[tid, t] : am.tasks)
        if (tid <= 1023) tasks.push_back(tid);
    PlatformModel current = pm;
    for (Tick ts : times) {
        ContextEvent e;
        e.timestamp = static_cast<std::uint16_t>(ts);
        std::vector<HwId> candidates;
        for (const auto &u : current.units) {
            if (!u.available || u.id > 63) continue;
            PlatformModel probe = current;
            probe.units[static_cast<std::size_t>(u.id)].available = false;
            if (!probe.end_systems(true).empty() && platform_connected(probe)) candidates.push_back(u.id);
        }
        const std::size_t kind = uniform_index(rng, 3);
        if (kind == 0 && !candidates.empty()) {
            e.kind = ContextKind::failure;
            e.hw_id = static_cast<std::uint8_t>(candidates[uniform_index(rng, candidates.size())]);
            current = apply_failure(current, e);
        } else if (kind == 2) {
            e.kind = ContextKind::mode_change;
            e.value = static_cast<std::uint8_t>(1 + uniform_index(rng, 3));
        } else {
            e.kind = ContextKind::slack;
            e.value = static_cast<std::uint8_t>(1 + uniform_index(rng, 7));
            e.affected_task = static_cast<std::uint16_t>(tasks[uniform_index(rng, tasks.size())]);
        }
        encode_context_word(e);
        cm.events.push_back(e);
    }
    return cm;
}

} // namespace ttms
