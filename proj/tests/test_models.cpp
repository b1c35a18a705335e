#include "doctest.h"

#include "support.hpp"
#include "ttms/errors.hpp"

using namespace ttms;
using testing::chain;

namespace {

ContextEvent slack(TaskId task, unsigned value) {
    return {ContextKind::slack, static_cast<std::uint8_t>(value), static_cast<std::uint16_t>(task), 0, 0};
}
ContextEvent failure(HwId hw) { return {ContextKind::failure, 0, 0, 0, static_cast<std::uint8_t>(hw)}; }
ContextEvent mode(unsigned value) { return {ContextKind::mode_change, static_cast<std::uint8_t>(value), 0, 0, 0}; }

PlatformModel five_es() { return PlatformModel::build(5, 1, {{0, 5}, {1, 5}, {2, 5}, {3, 5}, {4, 5}}); }

} // namespace

TEST_CASE("slack shortens the affected task") {
    AppModel am = chain({10, 7, 1});
    const AppModel before = am;
    CHECK(apply_slack(am, slack(0, 4)).tasks.at(0).wcet == 5);
    CHECK(apply_slack(am, slack(0, 0)) == am);
    CHECK(apply_slack(am, slack(2, 7)).tasks.at(2).wcet == 1);
    // ceil(7 * 5 / 8) = 5
    CHECK(apply_slack(am, slack(1, 3)).tasks.at(1).wcet == 5);
    CHECK(apply_slack(am, slack(1, 3)).tasks.at(0).wcet == 10);
    CHECK(am == before);
    CHECK_THROWS_AS(apply_slack(am, slack(9, 1)), UnknownTaskError);
}

TEST_CASE("failure clears availability and is idempotent") {
    const PlatformModel pm = five_es();
    const PlatformModel once = apply_failure(pm, failure(2));
    CHECK_FALSE(once.is_available(2));
    CHECK(once.end_systems(true).size() == 4);
    CHECK(pm.is_available(2));
    CHECK(apply_failure(once, failure(2)) == once);
    CHECK_THROWS_AS(apply_failure(pm, failure(40)), UnknownHardwareError);

    PlatformModel single = PlatformModel::build(1, 0, {});
    CHECK_THROWS_AS(apply_failure(single, failure(0)), PlatformExhaustedError);
}

TEST_CASE("mode change scales every wcet by the inverse frequency") {
    AppModel am = chain({4, 5, 3});
    const PlatformModel pm = five_es();
    const auto [am0, pm0] = apply_mode_change(am, pm, mode(0));
    CHECK(am0 == am);
    CHECK(pm0 == pm);
    const auto [am4, pm4] = apply_mode_change(am, pm, mode(4));
    CHECK(am4.tasks.at(0).wcet == 8);
    CHECK(am4.tasks.at(1).wcet == 10);
    CHECK(am4.tasks.at(2).wcet == 6);
    CHECK(pm4.frequency_scale == doctest::Approx(0.5));
    // ceil(3 * 8 / 5) = 5
    const auto [am3, pm3] = apply_mode_change(am, pm, mode(3));
    CHECK(am3.tasks.at(2).wcet == 5);
    const auto [am33, pm33] = apply_mode_change(am3, pm3, mode(3));
    CHECK(pm33.frequency_scale == doctest::Approx(25.0 / 64.0));
}

TEST_CASE("apply_event dispatch") {
    AppModel am = chain({8});
    const PlatformModel pm = five_es();
    CHECK(apply_event(am, pm, ContextEvent{}).first == am);
    CHECK(apply_event(am, pm, slack(0, 4)).first.tasks.at(0).wcet == 4);
    CHECK_FALSE(apply_event(am, pm, failure(1)).second.is_available(1));
}

TEST_CASE("application model validation") {
    AppModel am = chain({1, 2});
    CHECK_NOTHROW(am.validate());
    am.messages[0] = testing::message(0, 1, 1, 2);
    CHECK_THROWS_AS(am.validate(), ModelError);
    am.messages[0] = testing::message(0, 0, 7, 2);
    CHECK_THROWS_AS(am.validate(), ModelError);
    am.messages.clear();
    am.tasks[0].wcet = 0;
    CHECK_THROWS_AS(am.validate(), ModelError);
}

TEST_CASE("task graph detects cycles and orders topologically") {
    AppModel am = chain({1, 1, 1});
    const TaskGraph g(am);
    CHECK(g.topological_order() == std::vector<TaskId>{0, 1, 2});
    am.messages[0] = testing::message(0, 2, 0, 1);
    CHECK_THROWS_AS(TaskGraph{am}, CycleDetectedError);
}

TEST_CASE("platform id space and validation") {
    const PlatformModel pm = five_es();
    CHECK(pm.end_systems() == std::vector<HwId>{0, 1, 2, 3, 4});
    CHECK(pm.routers() == std::vector<HwId>{5});
    CHECK(pm.links().size() == 5);
    CHECK(pm.unit(6).kind == HardwareKind::link);
    CHECK_THROWS_AS(pm.unit(64), UnknownHardwareError);
    std::vector<std::pair<int, int>> many;
    for (int i = 0; i < 60; ++i) many.emplace_back(0, 1);
    CHECK_THROWS_AS(PlatformModel::build(3, 2, many), ModelError);
}
