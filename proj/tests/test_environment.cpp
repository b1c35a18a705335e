#include "doctest.h"

#include <cmath>

#include "support.hpp"
#include "ttms/errors.hpp"
#include "ttms/online.hpp"

using namespace ttms;

namespace {

FrozenPrefix from_scratch(const AppModel &am) {
    FrozenPrefix p;
    for (const auto &[id, t] : am.tasks) p.pending.insert(id);
    return p;
}

SchedulingEnvironment small_env(std::uint64_t seed, int tasks, int es, EnvironmentOptions opt = {}) {
    const auto sc = testing::random_scenario(seed, tasks, es, 0.4);
    return SchedulingEnvironment(sc.am, sc.pm, {ProfileKind::makespan, sc.am.deadline}, from_scratch(sc.am), {}, opt);
}

// Reward of every complete assignment of the decision tasks.
double brute_force_best(const SchedulingEnvironment &env) {
    const auto &tasks = env.decision_tasks();
    const auto &es = env.choices();
    std::size_t total = 1;
    for (std::size_t i = 0; i < tasks.size(); ++i) total *= es.size();
    double best = -INFINITY;
    for (std::size_t code = 0; code < total; ++code) {
        Assignment a;
        std::size_t c = code;
        for (TaskId t : tasks) {
            a[t] = es[c % es.size()];
            c /= es.size();
        }
        best = std::max(best, env.evaluate(a).reward);
    }
    return best;
}

} // namespace

TEST_CASE("arm space enumerates complete assignments up to the cap") {
    const auto env = small_env(1, 4, 3);
    CHECK(env.decision_tasks().size() == 4);
    CHECK(env.choices() == std::vector<HwId>{0, 1, 2});
    CHECK(env.enumerated_tasks() == 4);
    CHECK(env.action_count() == 81);
    CHECK(env.agent_action_counts() == std::vector<std::size_t>(4, 3));
    CHECK(env.decision_tasks() == priority_order(b_level(env.app())));

    const auto zero = env.resolve(0);
    for (const auto &[t, es] : zero) CHECK(es == 0);
    const auto one = env.resolve(1);
    CHECK(one.at(env.decision_tasks()[0]) == 1);
    CHECK(one.at(env.decision_tasks()[1]) == 0);
    const auto last = env.resolve(80);
    for (const auto &[t, es] : last) CHECK(es == 2);
    CHECK_THROWS_AS(env.resolve(81), UnknownActionError);

    EnvironmentOptions capped;
    capped.arm_cap = 10;
    const auto c = small_env(1, 4, 3, capped);
    CHECK(c.enumerated_tasks() == 2);
    CHECK(c.action_count() == 9);
    // Remaining tasks are placed least-loaded, so every arm still assigns every task.
    for (std::size_t a = 0; a < c.action_count(); ++a) CHECK(c.resolve(a).size() == 4);
}

TEST_CASE("joint actions map one choice per decision task") {
    const auto env = small_env(2, 3, 2);
    const auto a = env.resolve_joint({1, 0, 1});
    CHECK(a.at(env.decision_tasks()[0]) == 1);
    CHECK(a.at(env.decision_tasks()[1]) == 0);
    CHECK(a.at(env.decision_tasks()[2]) == 1);
    CHECK_THROWS_AS(env.resolve_joint({1, 0}), DimensionMismatchError);
    CHECK_THROWS_AS(env.resolve_joint({1, 0, 2}), UnknownActionError);
}

TEST_CASE("evaluation penalises broken assignments") {
    const auto env = small_env(3, 4, 2);
    CHECK(env.penalty() == -10.0 * static_cast<double>(env.app().deadline));
    const auto ok = env.pull(0);
    CHECK(ok.feasible);
    CHECK(ok.schedule.has_value());
    CHECK(ok.reward == -static_cast<double>(ok.schedule->makespan));
    Assignment bad = env.resolve(0);
    bad.begin()->second = 17;
    const auto o = env.evaluate(bad);
    CHECK(!o.feasible);
    CHECK(o.reward == env.penalty());
    CHECK(!o.schedule.has_value());
}

TEST_CASE("frozen work counts towards loads and is not a decision") {
    const auto sc = testing::random_scenario(4, 8, 3);
    const Schedule s = testing::heuristic_schedule(sc.am, sc.pm);
    const Tick t = s.makespan / 2;
    const auto prefix = fix_past(s, t, sc.am, sc.pm);
    const SchedulingEnvironment env(sc.am, sc.pm, {ProfileKind::makespan, sc.am.deadline}, prefix);
    CHECK(env.decision_tasks().size() == prefix.pending.size());
    std::map<HwId, Tick> loads;
    for (const auto &[id, e] : prefix.tasks) loads[e.es] += e.end - e.start;
    for (const auto &[es, l] : env.frozen_loads()) CHECK(l == loads[es]);
    const auto o = env.pull(0);
    REQUIRE(o.feasible);
    for (const auto &[id, e] : prefix.tasks) CHECK(o.schedule->tasks.at(id) == e);
}

TEST_CASE("online learning finds the enumerable optimum") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto env = small_env(seed, 4, 2);
        REQUIRE(env.action_count() == 16);
        const double best = brute_force_best(env);
        for (ModelKind kind : {ModelKind::mab, ModelKind::marl}) {
            const auto r = run_online_learning(env, kind, kind == ModelKind::mab ? 200 : 500, {}, seed);
            CHECK(r.status == OnlineStatus::ok);
            CHECK(*r.catalog.best_reward == best);
            REQUIRE(r.dataset.size() == 1);
            CHECK(env.evaluate(r.dataset[0].assignment).reward == best);
            CHECK(r.dataset[0].features == env.features());
        }
    }
}

TEST_CASE("online runs are seeded, monotone and safe") {
    const auto env = small_env(7, 6, 3);
    for (ModelKind kind : {ModelKind::mab, ModelKind::cb, ModelKind::marl}) {
        const auto a = run_online_learning(env, kind, 120, {}, 99);
        const auto b = run_online_learning(env, kind, 120, {}, 99);
        CHECK(a.catalog.rewards == b.catalog.rewards);
        CHECK(a.trace.size() == 120);
        for (std::size_t i = 1; i < a.catalog.best_so_far.size(); ++i)
            CHECK(a.catalog.best_so_far[i] >= a.catalog.best_so_far[i - 1]);
        CHECK(*a.catalog.best_reward == *std::max_element(a.catalog.rewards.begin(), a.catalog.rewards.end()));
        double prev = -INFINITY;
        for (const auto &s : a.improvements) {
            CHECK(safety_check(s, env.app(), env.platform()).empty());
            const double r = -static_cast<double>(s.makespan);
            CHECK(r > prev);
            prev = r;
        }
        CHECK(a.trace.front().epsilon == 1.0);
        CHECK(a.trace.back().epsilon == doctest::Approx(std::pow(default_decay(kind), 119)));
        if (kind == ModelKind::mab) CHECK(std::isnan(a.trace.back().prediction_error));
        else CHECK(!std::isnan(a.trace.back().prediction_error));
    }
    CHECK(run_online_learning(env, ModelKind::mab, 50, {}, 1).catalog.rewards !=
          run_online_learning(env, ModelKind::mab, 50, {}, 2).catalog.rewards);
}

TEST_CASE("zero budget gives an empty result") {
    const auto env = small_env(1, 4, 2);
    const auto r = run_online_learning(env, ModelKind::cb, 0, {}, 1);
    CHECK(r.status == OnlineStatus::empty);
    CHECK(!r.catalog.best_reward.has_value());
    CHECK(r.trace.empty());
    CHECK(r.dataset.empty());
    CHECK(r.improvements.empty());
}

TEST_CASE("isolated end systems force co-location") {
    AppModel am = testing::chain({2});
    am.tasks[1] = Task{1, 1, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 1, 3);
    am.deadline = 10;
    const SchedulingEnvironment env(am, PlatformModel::build(2, 0, {}), {ProfileKind::makespan, 10}, from_scratch(am));
    CHECK(!env.evaluate({{0, 0}, {1, 1}}).feasible);
    const auto r = run_online_learning(env, ModelKind::mab, 40, {}, 1);
    CHECK(r.status == OnlineStatus::ok);
    CHECK(*r.catalog.best_reward == -3.0);
}

TEST_CASE("no feasible schedule is reported") {
    // Frozen senders on two isolated end systems: no placement of the receiver reaches both.
    AppModel am;
    for (TaskId i = 0; i < 3; ++i) am.tasks[i] = Task{i, 2, {}, {}, {}, {}};
    am.messages[0] = testing::message(0, 0, 2, 1);
    am.messages[1] = testing::message(1, 1, 2, 1);
    am.deadline = 10;
    FrozenPrefix prefix;
    prefix.event_time = 2;
    prefix.tasks[0] = TaskEntry{0, 0, 2};
    prefix.tasks[1] = TaskEntry{1, 0, 2};
    prefix.pending = {2};
    const SchedulingEnvironment env(am, PlatformModel::build(2, 0, {}), {ProfileKind::makespan, 10}, prefix);
    for (ModelKind kind : {ModelKind::mab, ModelKind::cb, ModelKind::marl}) {
        const auto r = run_online_learning(env, kind, 10, {}, 1);
        CHECK(r.status == OnlineStatus::no_feasible);
        CHECK(*r.catalog.best_reward == -100.0);
        CHECK(r.dataset.empty());
        CHECK(r.improvements.empty());
    }
}

TEST_CASE("model kinds parse") {
    CHECK(parse_model_kind("mab") == ModelKind::mab);
    CHECK(parse_model_kind("cb") == ModelKind::cb);
    CHECK(parse_model_kind("marl") == ModelKind::marl);
    CHECK_THROWS_AS(parse_model_kind("dqn"), ConfigError);
    CHECK(to_string(ModelKind::marl) == "marl");
    CHECK(default_decay(ModelKind::mab) == 0.963);
    CHECK(default_decay(ModelKind::cb) == 0.96);
    CHECK(default_decay(ModelKind::marl) == 0.99);
}

TEST_CASE("arm encodings mark the resolved end system of every decision task") {
    const auto env = small_env(3, 5, 3);
    const Eigen::MatrixXd enc = env.arm_encodings();
    const auto k = static_cast<Eigen::Index>(env.choices().size());
    REQUIRE(enc.cols() == static_cast<Eigen::Index>(env.action_count()));
    REQUIRE(enc.rows() == static_cast<Eigen::Index>(env.decision_tasks().size()) * k);
    for (std::size_t arm = 0; arm < env.action_count(); ++arm) {
        const Assignment a = env.resolve(arm);
        const auto col = enc.col(static_cast<Eigen::Index>(arm));
        CHECK(col.sum() == doctest::Approx(static_cast<double>(env.decision_tasks().size())));
        for (std::size_t i = 0; i < env.decision_tasks().size(); ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                CHECK(col(static_cast<Eigen::Index>(i) * k + j) ==
                      (env.choices()[static_cast<std::size_t>(j)] == a.at(env.decision_tasks()[i]) ? 1.0 : 0.0));
    }
}
