#pragma once

#include <cstdint>

#include "ttms/context.hpp"
#include "ttms/io.hpp"

namespace ttms {

struct ScenarioConfig {
    int n_tasks = 10;
    int n_end_systems = 3;
    int n_routers = 2;
    /// Probability of an edge from each task of the previous layer.
    double edge_density = 0.3;
    Tick wcet_min = 5;
    Tick wcet_max = 20;
    /// Fraction of precedence edges carried as messages.
    double message_density = 0.5;
    Tick message_size_min = 1;
    Tick message_size_max = 5;
    double deadline_factor = 1.2;
    std::uint64_t seed = 1;

    /// Throws ConfigError.
    void validate() const;
};

/// Layered random DAG on a platform where end system i links to routers i mod R and (i + 1) mod R
/// and routers form a chain. Deadline = ceil(deadline_factor * heuristic makespan).
Scenario generate_scenario(const ScenarioConfig &cfg);

/// Makespan of the built-in heuristic schedule.
Tick heuristic_makespan(const AppModel &am, const PlatformModel &pm);

/// `n_events` failure, slack and mode-change events with strictly increasing timestamps in
/// [1, horizon), horizon = min(heuristic makespan, 1023). Failures are chosen so that, applied in
/// order, at least one end system stays available and the available end systems stay connected.
/// Throws HorizonTooShortError.
ContextModel inject_events(const AppModel &am, const PlatformModel &pm, int n_events, std::uint64_t seed);

/// True when every pair of available end systems has a route over available hardware.
bool platform_connected(const PlatformModel &pm);

} // namespace ttms
