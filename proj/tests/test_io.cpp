#include "doctest.h"

#include <filesystem>

#include "support.hpp"
#include "ttms/errors.hpp"
#include "ttms/io.hpp"

using namespace ttms;

TEST_CASE("application and platform models round trip") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto sc = testing::random_scenario(seed, 9, 3);
        CHECK(app_from_json(to_json(sc.am)) == sc.am);
        CHECK(platform_from_json(to_json(sc.pm)) == sc.pm);
        const auto back = scenario_from_json(Json::parse(scenario_to_json(sc).dump()));
        CHECK(back.am == sc.am);
        CHECK(back.pm == sc.pm);
    }
    AppModel am = testing::chain({3, 4});
    am.tasks[0].temporal_priority = 7.0;
    am.tasks[0].assigned_es = 1;
    am.tasks[0].start_time = 0;
    CHECK(app_from_json(to_json(am)) == am);
    PlatformModel pm = PlatformModel::build(2, 1, {{0, 2}, {1, 2}});
    pm.units[1].available = false;
    pm.frequency_scale = 0.625;
    CHECK(platform_from_json(to_json(pm)) == pm);
}

TEST_CASE("malformed models are rejected") {
    CHECK_THROWS_AS(app_from_json(Json::parse(R"({"tasks": []})")), FormatError);
    CHECK_THROWS_AS(app_from_json(Json::parse(R"({"deadline": 5, "tasks": [{"id": 0, "wcet": "x"}]})")), FormatError);
    CHECK_THROWS_AS(app_from_json(Json::parse(R"({"deadline": 5, "tasks": [{"id": 0, "wcet": 1}, {"id": 0, "wcet": 1}]})")),
                    FormatError);
    CHECK_THROWS_AS(app_from_json(Json::parse(
                        R"({"deadline": 5, "tasks": [{"id": 0, "wcet": 1, "predecessors": [1]}, {"id": 1, "wcet": 1, "predecessors": [0]}]})")),
                    FormatError);
    CHECK_THROWS_AS(platform_from_json(Json::parse(R"({"units": [{"id": 0, "kind": "toaster"}]})")), FormatError);
    CHECK_THROWS_AS(platform_from_json(Json::parse(R"({"units": [{"id": 0, "kind": "link", "a": 0, "b": 9}]})")),
                    FormatError);
    CHECK_THROWS_AS(scenario_from_json(Json{{"version", 99}, {"app", to_json(testing::chain({1}))},
                                            {"platform", to_json(PlatformModel::build(1, 0, {}))}}),
                    FormatError);
}

TEST_CASE("context events accept words, fields or both") {
    const ContextEvent e{ContextKind::failure, 3, 42, 500, 7};
    const Json j = to_json(e);
    CHECK(j["word"] == "0x2c2a7d07");
    CHECK(j["kind"] == "failure");
    CHECK(event_from_json(j) == e);
    CHECK(event_from_json(Json{{"word", "0x2c2a7d07"}}) == e);
    Json fields = j;
    fields.erase("word");
    CHECK(event_from_json(fields) == e);
    Json disagree = j;
    disagree["hw_id"] = 8;
    CHECK_THROWS_AS(event_from_json(disagree), FormatError);
    Json overflow = fields;
    overflow["value"] = 9;
    CHECK_THROWS_AS(event_from_json(overflow), FormatError);
    CHECK_THROWS_AS(event_from_json(Json{{"word", "zz"}}), FormatError);
    CHECK_THROWS_AS(event_from_json(Json::object()), FormatError);

    ContextModel cm{{e, {ContextKind::slack, 2, 1, 600, 0}}};
    const auto back = context_from_json(Json::parse(to_json(cm).dump()));
    CHECK(back.events == cm.events);
    ContextModel unordered{{{ContextKind::slack, 2, 1, 600, 0}, e}};
    CHECK_THROWS_AS(context_from_json(to_json(unordered)), FormatError);
}

TEST_CASE("schedules and graphs round trip") {
    const auto sc = testing::random_scenario(6, 8, 3);
    const Schedule s = testing::heuristic_schedule(sc.am, sc.pm);
    const Schedule back = schedule_from_json(Json::parse(to_json(s).dump()));
    CHECK(back == s);
    CHECK(back.makespan == s.makespan);
    CHECK(back.end_systems == s.end_systems);
    CHECK(back.power_factor == s.power_factor);

    const ContextEvent ev{ContextKind::slack, 4, 0, 0, 0};
    const auto g = build_offline_msg(sc.am, sc.pm, {ev, {ContextKind::failure, 0, 0, 5, 1}}, 2).graph;
    const auto g2 = msg_from_json(Json::parse(to_json(g).dump()));
    CHECK(g2.node_count() == g.node_count());
    CHECK(g2.edges() == g.edges());
    for (NodeId i = 0; i < static_cast<NodeId>(g.node_count()); ++i) {
        CHECK(g2.node(i).schedule == g.node(i).schedule);
        CHECK(g2.node(i).am == g.node(i).am);
        CHECK(g2.node(i).pm == g.node(i).pm);
        CHECK(g2.node(i).origin == g.node(i).origin);
    }
    const Json jg = to_json(g);
    CHECK(jg["edges"][0]["word"].get<std::string>().rfind("0x", 0) == 0);

    Json cyclic = jg;
    cyclic["edges"].push_back(Json{{"from", 1}, {"word", "0x00000001"}, {"to", 0}});
    CHECK_THROWS_AS(msg_from_json(cyclic), FormatError);
    Json dangling = jg;
    dangling["edges"].push_back(Json{{"from", 0}, {"word", "0x00000001"}, {"to", 99}});
    CHECK_THROWS_AS(msg_from_json(dangling), FormatError);
    Json empty = jg;
    empty["nodes"] = Json::array();
    empty["edges"] = Json::array();
    CHECK_THROWS_AS(msg_from_json(empty), FormatError);
}

TEST_CASE("json files") {
    const auto dir = std::filesystem::temp_directory_path() / "ttms_io_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "nested" / "x.json";
    write_json_file(path, Json{{"a", 1}});
    CHECK(read_json_file(path)["a"] == 1);
    write_text_file(dir / "bad.json", "{nope");
    CHECK_THROWS_AS(read_json_file(dir / "bad.json"), FormatError);
    CHECK_THROWS_AS(read_json_file(dir / "missing.json"), FormatError);
    std::filesystem::remove_all(dir);
}
