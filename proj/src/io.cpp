#include "ttms/io.hpp"

#include <fstream>
#include <sstream>

#include "ttms/errors.hpp"

namespace ttms {

namespace {

std::string kind_name(HardwareKind k) {
    switch (k) {
    case HardwareKind::end_system: return "end_system";
    case HardwareKind::router: return "router";
    case HardwareKind::link: return "link";
    }
    return "unknown";
}

HardwareKind parse_hw_kind(const std::string &s) {
    if (s == "end_system") return HardwareKind::end_system;
    if (s == "router") return HardwareKind::router;
    if (s == "link") return HardwareKind::link;
    throw FormatError("unknown hardware kind '" + s + "'");
}

template <typename T>
T field(const Json &j, const char *name) {
    if (!j.is_object() || !j.contains(name)) throw FormatError(std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("field '") + name + "': " + e.what());
    }
}

template <typename T>
std::optional<T> optional_field(const Json &j, const char *name) {
    if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
    return field<T>(j, name);
}

template <typename T>
void put_optional(Json &j, const char *name, const std::optional<T> &v) {
    if (v) j[name] = *v;
}

Json entry_json(const TaskEntry &e) { return Json{{"es", e.es}, {"start", e.start}, {"end", e.end}}; }

} // namespace

Json to_json(const AppModel &am) {
    Json tasks = Json::array();
    for (const auto &[id, t] : am.tasks) {
        Json jt{{"id", t.id}, {"wcet", t.wcet}, {"predecessors", std::vector<TaskId>(t.predecessors.begin(), t.predecessors.end())}};
        put_optional(jt, "temporal_priority", t.temporal_priority);
        put_optional(jt, "assigned_es", t.assigned_es);
        put_optional(jt, "start_time", t.start_time);
        tasks.push_back(std::move(jt));
    }
    Json msgs = Json::array();
    for (const auto &[id, m] : am.messages) {
        Json jm{{"id", m.id}, {"tx_task", m.tx_task}, {"rx_task", m.rx_task}, {"size", m.size}};
        put_optional(jm, "inj_time", m.inj_time);
        if (!m.route.empty()) jm["route"] = m.route;
        put_optional(jm, "tx_es", m.tx_es);
        put_optional(jm, "rx_es", m.rx_es);
        put_optional(jm, "start_time", m.start_time);
        put_optional(jm, "end_time", m.end_time);
        msgs.push_back(std::move(jm));
    }
    return Json{{"deadline", am.deadline}, {"tasks", std::move(tasks)}, {"messages", std::move(msgs)}};
}

AppModel app_from_json(const Json &j) {
    AppModel am;
    am.deadline = field<Tick>(j, "deadline");
    for (const auto &jt : field<Json>(j, "tasks")) {
        Task t;
        t.id = field<TaskId>(jt, "id");
        t.wcet = field<Tick>(jt, "wcet");
        if (jt.contains("predecessors")) {
            const auto preds = field<std::vector<TaskId>>(jt, "predecessors");
            t.predecessors.insert(preds.begin(), preds.end());
        }
        t.temporal_priority = optional_field<double>(jt, "temporal_priority");
        t.assigned_es = optional_field<HwId>(jt, "assigned_es");
        t.start_time = optional_field<Tick>(jt, "start_time");
        if (!am.tasks.emplace(t.id, t).second) throw FormatError("duplicate task id " + std::to_string(t.id));
    }
    if (j.contains("messages"))
        for (const auto &jm : field<Json>(j, "messages")) {
            Message m;
            m.id = field<MsgId>(jm, "id");
            m.tx_task = field<TaskId>(jm, "tx_task");
            m.rx_task = field<TaskId>(jm, "rx_task");
            m.size = field<Tick>(jm, "size");
            m.inj_time = optional_field<Tick>(jm, "inj_time");
            if (jm.contains("route")) m.route = field<std::vector<HwId>>(jm, "route");
            m.tx_es = optional_field<HwId>(jm, "tx_es");
            m.rx_es = optional_field<HwId>(jm, "rx_es");
            m.start_time = optional_field<Tick>(jm, "start_time");
            m.end_time = optional_field<Tick>(jm, "end_time");
            if (!am.messages.emplace(m.id, m).second) throw FormatError("duplicate message id " + std::to_string(m.id));
        }
    try {
        am.validate();
    } catch (const Error &e) {
        throw FormatError(std::string("invalid application model: ") + e.what());
    }
    return am;
}

Json to_json(const PlatformModel &pm) {
    Json units = Json::array();
    for (const auto &u : pm.units) {
        Json ju{{"id", u.id}, {"kind", kind_name(u.kind)}, {"available", u.available}};
        if (u.kind == HardwareKind::link) {
            ju["a"] = u.a;
            ju["b"] = u.b;
        }
        units.push_back(std::move(ju));
    }
    return Json{{"frequency_scale", pm.frequency_scale}, {"units", std::move(units)}};
}

PlatformModel platform_from_json(const Json &j) {
    PlatformModel pm;
    pm.frequency_scale = j.contains("frequency_scale") ? field<double>(j, "frequency_scale") : 1.0;
    for (const auto &ju : field<Json>(j, "units")) {
        Hardware h;
        h.id = field<HwId>(ju, "id");
        h.kind = parse_hw_kind(field<std::string>(ju, "kind"));
        h.available = ju.contains("available") ? field<bool>(ju, "available") : true;
        if (h.kind == HardwareKind::link) {
            h.a = field<HwId>(ju, "a");
            h.b = field<HwId>(ju, "b");
        }
        pm.units.push_back(h);
    }
    try {
        pm.validate();
    } catch (const Error &e) {
        throw FormatError(std::string("invalid platform model: ") + e.what());
    }
    return pm;
}

Json to_json(const ContextEvent &e) {
    return Json{{"word", to_hex(encode_context_word(e))},
                {"kind", to_string(e.kind)},
                {"value", e.value},
                {"affected_task", e.affected_task},
                {"timestamp", e.timestamp},
                {"hw_id", e.hw_id}};
}

ContextEvent event_from_json(const Json &j) {
    std::optional<ContextEvent> from_word;
    if (j.contains("word")) {
        try {
            from_word = decode_context_word(parse_hex_word(field<std::string>(j, "word")));
        } catch (const Error &e) {
            throw FormatError(std::string("bad context word: ") + e.what());
        }
    }
    if (!j.contains("kind")) {
        if (!from_word) throw FormatError("context event needs a word or named fields");
        return *from_word;
    }
    ContextEvent e;
    try {
        e.kind = parse_context_kind(field<std::string>(j, "kind"));
        e.value = static_cast<std::uint8_t>(field<unsigned>(j, "value"));
        e.affected_task = static_cast<std::uint16_t>(field<unsigned>(j, "affected_task"));
        e.timestamp = static_cast<std::uint16_t>(field<unsigned>(j, "timestamp"));
        e.hw_id = static_cast<std::uint8_t>(field<unsigned>(j, "hw_id"));
        encode_context_word(e);
    } catch (const FormatError &) {
        throw;
    } catch (const Error &e2) {
        throw FormatError(std::string("bad context event: ") + e2.what());
    }
    if (from_word && *from_word != e) throw FormatError("context word disagrees with the named fields");
    return e;
}

Json to_json(const ContextModel &cm) {
    Json events = Json::array();
    for (const auto &e : cm.events) events.push_back(to_json(e));
    return Json{{"version", scenario_format_version}, {"events", std::move(events)}};
}

ContextModel context_from_json(const Json &j) {
    ContextModel cm;
    for (const auto &je : field<Json>(j, "events")) cm.events.push_back(event_from_json(je));
    try {
        cm.validate();
    } catch (const Error &e) {
        throw FormatError(std::string("invalid context model: ") + e.what());
    }
    return cm;
}

Json to_json(const Schedule &s) {
    Json tasks = Json::array();
    for (const auto &[tid, e] : s.tasks) {
        Json jt = entry_json(e);
        jt["task"] = tid;
        tasks.push_back(std::move(jt));
    }
    Json msgs = Json::array();
    for (const auto &[mid, m] : s.messages)
        msgs.push_back(Json{{"message", mid},
                            {"tx_task", m.tx_task},
                            {"rx_task", m.rx_task},
                            {"tx_es", m.tx_es},
                            {"rx_es", m.rx_es},
                            {"route", m.route},
                            {"start", m.start},
                            {"end", m.end}});
    return Json{{"makespan", s.makespan},         {"active_from", s.active_from}, {"power_factor", s.power_factor},
                {"end_systems", s.end_systems},   {"tasks", std::move(tasks)},    {"messages", std::move(msgs)}};
}

Schedule schedule_from_json(const Json &j) {
    Schedule s;
    s.makespan = field<Tick>(j, "makespan");
    s.active_from = j.contains("active_from") ? field<Tick>(j, "active_from") : 0;
    s.power_factor = j.contains("power_factor") ? field<double>(j, "power_factor") : 1.0;
    if (j.contains("end_systems")) s.end_systems = field<std::vector<HwId>>(j, "end_systems");
    for (const auto &jt : field<Json>(j, "tasks"))
        s.tasks[field<TaskId>(jt, "task")] = {field<HwId>(jt, "es"), field<Tick>(jt, "start"), field<Tick>(jt, "end")};
    for (const auto &jm : field<Json>(j, "messages"))
        s.messages[field<MsgId>(jm, "message")] = {field<TaskId>(jm, "tx_task"), field<TaskId>(jm, "rx_task"),
                                                   field<HwId>(jm, "tx_es"),     field<HwId>(jm, "rx_es"),
                                                   field<std::vector<HwId>>(jm, "route"),
                                                   field<Tick>(jm, "start"),     field<Tick>(jm, "end")};
    return s;
}

Json to_json(const MultiScheduleGraph &g) {
    Json nodes = Json::array();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto &n = g.node(static_cast<NodeId>(i));
        nodes.push_back(Json{{"id", i},
                             {"origin", to_string(n.origin)},
                             {"schedule", to_json(n.schedule)},
                             {"app", to_json(n.am)},
                             {"platform", to_json(n.pm)}});
    }
    Json edges = Json::array();
    for (const auto &[key, target] : g.edges())
        edges.push_back(Json{{"from", key.first}, {"word", to_hex(key.second)}, {"to", target}});
    return Json{{"version", scenario_format_version}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

MultiScheduleGraph msg_from_json(const Json &j) {
    std::vector<MultiScheduleGraph::Node> nodes;
    for (const auto &jn : field<Json>(j, "nodes")) {
        if (field<std::size_t>(jn, "id") != nodes.size()) throw FormatError("node ids must be dense and ordered");
        MultiScheduleGraph::Node n;
        const auto origin = field<std::string>(jn, "origin");
        if (origin == "offline") n.origin = NodeOrigin::offline;
        else if (origin == "online_discovered") n.origin = NodeOrigin::online_discovered;
        else throw FormatError("unknown node origin '" + origin + "'");
        n.schedule = schedule_from_json(field<Json>(jn, "schedule"));
        n.am = app_from_json(field<Json>(jn, "app"));
        n.pm = platform_from_json(field<Json>(jn, "platform"));
        nodes.push_back(std::move(n));
    }
    if (nodes.empty()) throw FormatError("graph has no root node");
    std::map<std::pair<NodeId, ContextWord>, NodeId> edges;
    for (const auto &je : field<Json>(j, "edges")) {
        ContextWord w;
        try {
            w = parse_hex_word(field<std::string>(je, "word"));
        } catch (const Error &e) {
            throw FormatError(std::string("bad edge word: ") + e.what());
        }
        if (!edges.emplace(std::pair{field<NodeId>(je, "from"), w}, field<NodeId>(je, "to")).second)
            throw FormatError("duplicate edge key " + to_hex(w));
    }
    try {
        return MultiScheduleGraph::assemble(std::move(nodes), edges);
    } catch (const FormatError &) {
        throw;
    } catch (const Error &e) {
        throw FormatError(std::string("invalid graph: ") + e.what());
    }
}

Json scenario_to_json(const Scenario &s) {
    return Json{{"version", scenario_format_version}, {"app", to_json(s.am)}, {"platform", to_json(s.pm)}};
}

Scenario scenario_from_json(const Json &j) {
    if (j.contains("version") && field<int>(j, "version") != scenario_format_version)
        throw FormatError("unsupported scenario version");
    return {app_from_json(field<Json>(j, "app")), platform_from_json(field<Json>(j, "platform"))};
}

Json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path &path, const Json &j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
}

} // namespace ttms
