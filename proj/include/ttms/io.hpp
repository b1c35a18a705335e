#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ttms/msg_graph.hpp"

namespace ttms {

using Json = nlohmann::ordered_json;

inline constexpr int scenario_format_version = 1;

Json to_json(const AppModel &am);
Json to_json(const PlatformModel &pm);
Json to_json(const ContextEvent &event);
Json to_json(const ContextModel &cm);
Json to_json(const Schedule &s);
Json to_json(const MultiScheduleGraph &g);

/// All parsers throw FormatError on malformed documents.
AppModel app_from_json(const Json &j);
PlatformModel platform_from_json(const Json &j);
/// Accepts either {"word": "0x..."} or the five named fields; when both are given they must agree.
ContextEvent event_from_json(const Json &j);
ContextModel context_from_json(const Json &j);
Schedule schedule_from_json(const Json &j);
MultiScheduleGraph msg_from_json(const Json &j);

struct Scenario {
    AppModel am;
    PlatformModel pm;
};

Json scenario_to_json(const Scenario &s);
Scenario scenario_from_json(const Json &j);

Json read_json_file(const std::filesystem::path &path);
void write_json_file(const std::filesystem::path &path, const Json &j);
void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace ttms
