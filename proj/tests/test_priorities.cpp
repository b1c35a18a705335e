#include "doctest.h"

#include "support.hpp"
#include "ttms/errors.hpp"
#include "ttms/inference.hpp"

using namespace ttms;
using testing::chain;
using testing::diamond;

TEST_CASE("b-level worked examples") {
    CHECK(b_level(chain({7})).at(0) == 7.0);
    const auto c = b_level(chain({3, 2, 4}));
    CHECK(c.at(0) == 9.0);
    CHECK(c.at(1) == 6.0);
    CHECK(c.at(2) == 4.0);
    const auto d = b_level(diamond());
    CHECK(d.at(0) == 8.0);
    CHECK(d.at(1) == 4.0);
    CHECK(d.at(2) == 6.0);
    CHECK(d.at(3) == 1.0);
}

TEST_CASE("message edges count as zero-weight precedence") {
    AppModel am = chain({3});
    am.tasks[1] = Task{1, 5, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 1, 100);
    const auto b = b_level(am);
    CHECK(b.at(0) == 8.0);
    CHECK(b.at(1) == 5.0);
}

TEST_CASE("b-level rejects cycles") {
    AppModel am = chain({1, 1});
    am.tasks[0].predecessors.insert(1);
    CHECK_THROWS_AS(b_level(am), CycleDetectedError);
}

TEST_CASE("b-level equals the brute-force longest path on random DAGs") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto sc = testing::random_scenario(seed, 2 + static_cast<int>(seed % 11), 2, 0.5);
        const auto b = b_level(sc.am);
        const auto oracle = testing::longest_path_oracle(sc.am);
        CHECK(b == oracle);
        const TaskGraph g(sc.am);
        for (const auto &[id, t] : sc.am.tasks) {
            CHECK(b.at(id) >= static_cast<double>(t.wcet));
            if (g.successors(id).empty()) CHECK(b.at(id) == static_cast<double>(t.wcet));
            for (TaskId s : g.successors(id)) CHECK(b.at(id) > b.at(s));
        }
    }
}

TEST_CASE("priority order breaks ties by task id") {
    CHECK(priority_order({{0, 1.0}, {1, 3.0}, {2, 3.0}, {3, 2.0}}) == std::vector<TaskId>{1, 2, 3, 0});
}

TEST_CASE("least-loaded allocation") {
    const PlatformModel pm = PlatformModel::build(3, 1, {{0, 3}, {1, 3}, {2, 3}});
    AppModel one = chain({4});
    CHECK(least_loaded_allocation(one, pm, std::map<HwId, Tick>{{0, 10}, {1, 4}, {2, 4}}).at(0) == 1);

    const PlatformModel single = PlatformModel::build(1, 0, {});
    for (const auto &[id, es] : least_loaded_allocation(chain({1, 2, 3}), single)) CHECK(es == 0);

    AppModel two;
    two.tasks[0] = Task{0, 5, {}, {}, {}, {}};
    two.tasks[1] = Task{1, 5, {}, {}, {}, {}};
    const PlatformModel duo = PlatformModel::build(2, 1, {{0, 2}, {1, 2}});
    const auto a = least_loaded_allocation(two, duo);
    CHECK(a.at(0) == 0);
    CHECK(a.at(1) == 1);

    PlatformModel dead = duo;
    dead.units[0].available = false;
    dead.units[1].available = false;
    CHECK_THROWS_AS(least_loaded_allocation(two, dead), PlatformExhaustedError);
}

TEST_CASE("least-loaded allocation skips unavailable end systems") {
    PlatformModel pm = PlatformModel::build(3, 1, {{0, 3}, {1, 3}, {2, 3}});
    pm.units[0].available = false;
    for (const auto &[id, es] : least_loaded_allocation(chain({1, 1, 1, 1}), pm)) CHECK(es != 0);
}

TEST_CASE("least-loaded allocation uses declared temporal priorities when complete") {
    AppModel am;
    am.tasks[0] = Task{0, 5, {}, 1.0, {}, {}};
    am.tasks[1] = Task{1, 5, {}, 2.0, {}, {}};
    const PlatformModel duo = PlatformModel::build(2, 1, {{0, 2}, {1, 2}});
    const auto a = least_loaded_allocation(am, duo);
    CHECK(a.at(1) == 0);
    CHECK(a.at(0) == 1);
}

TEST_CASE("built-in inference composes b-level and least-loaded placement") {
    const PlatformModel pm = PlatformModel::build(2, 1, {{0, 2}, {1, 2}});
    const auto p = testing::heuristic(diamond(), pm);
    CHECK(p.temporal == b_level(diamond()));
    CHECK(p.spatial == least_loaded_allocation(diamond(), pm, p.temporal));
}

namespace {

class FixedAdapter final : public InferenceAdapter {
  public:
    explicit FixedAdapter(PriorityAssignment p) : p_(std::move(p)) {}
    PriorityAssignment infer(const AppModel &, const PlatformModel &, const ContextModel &) const override { return p_; }
    std::string name() const override { return "fixed"; }

  private:
    PriorityAssignment p_;
};

} // namespace

TEST_CASE("invalid inference outputs are rejected") {
    PlatformModel pm = PlatformModel::build(2, 1, {{0, 2}, {1, 2}});
    const AppModel am = chain({1, 1});
    PriorityAssignment p{{{0, 2.0}, {1, 1.0}}, {{0, 0}, {1, 1}}};
    CHECK_NOTHROW(infer_priorities(FixedAdapter(p), am, pm));
    pm.units[1].available = false;
    CHECK_THROWS_AS(infer_priorities(FixedAdapter(p), am, pm), InvalidInferenceError);
    pm.units[1].available = true;
    p.spatial[1] = 2;
    CHECK_THROWS_AS(infer_priorities(FixedAdapter(p), am, pm), InvalidInferenceError);
    p.spatial[1] = 1;
    p.temporal.erase(0);
    CHECK_THROWS_AS(infer_priorities(FixedAdapter(p), am, pm), InvalidInferenceError);
    p.temporal[0] = -1.0;
    CHECK_THROWS_AS(infer_priorities(FixedAdapter(p), am, pm), InvalidInferenceError);
}

TEST_CASE("zero-weight neural inference still yields valid priorities") {
    const FeatureLayout layout;
    std::vector<int> sizes{layout.size(), 8, layout.spatial_outputs()};
    const SpatialInference zero(Mlp(sizes), layout);
    const PlatformModel pm = PlatformModel::build(3, 1, {{0, 3}, {1, 3}, {2, 3}});
    const auto p = infer_priorities(zero, diamond(), pm);
    for (const auto &[id, es] : p.spatial) CHECK(es == 0);
    CHECK(p.temporal == b_level(diamond()));
}
