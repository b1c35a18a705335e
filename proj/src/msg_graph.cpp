#include "ttms/msg_graph.hpp"

#include <deque>
#include <set>

#include "ttms/errors.hpp"
#include "ttms/reconstructor.hpp"

namespace ttms {

std::string to_string(NodeOrigin origin) {
    return origin == NodeOrigin::offline ? "offline" : "online_discovered";
}

MultiScheduleGraph::MultiScheduleGraph(Schedule root, AppModel am, PlatformModel pm) {
    nodes_.push_back({std::move(root), NodeOrigin::offline, std::move(am), std::move(pm)});
}

const MultiScheduleGraph::Node &MultiScheduleGraph::node(NodeId id) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
        throw UnknownNodeError("unknown MSG node " + std::to_string(id));
    return nodes_[static_cast<std::size_t>(id)];
}

std::optional<NodeId> MultiScheduleGraph::transition(NodeId from, const ContextEvent &event) const {
    node(from);
    const auto it = edges_.find({from, encode_context_word(event)});
    if (it == edges_.end()) return std::nullopt;
    return it->second;
}

std::optional<NodeId> MultiScheduleGraph::find_schedule(const Schedule &s) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].schedule == s) return static_cast<NodeId>(i);
    return std::nullopt;
}

bool MultiScheduleGraph::reaches(NodeId target, NodeId from) const {
    std::set<NodeId> seen{target};
    std::deque<NodeId> queue{target};
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        if (u == from) return true;
        for (auto it = edges_.lower_bound({u, 0}); it != edges_.end() && it->first.first == u; ++it)
            if (seen.insert(it->second).second) queue.push_back(it->second);
    }
    return false;
}

MultiScheduleGraph MultiScheduleGraph::assemble(std::vector<Node> nodes,
                                                const std::map<std::pair<NodeId, ContextWord>, NodeId> &edges) {
    MultiScheduleGraph g;
    g.nodes_ = std::move(nodes);
    for (const auto &[key, target] : edges) {
        g.node(key.first);
        g.node(target);
        if (g.reaches(target, key.first))
            throw GraphCycleError("edge " + to_hex(key.second) + " from node " + std::to_string(key.first) +
                                  " closes a cycle");
        g.edges_.emplace(key, target);
    }
    return g;
}

NodeId MultiScheduleGraph::link(NodeId from, const ContextEvent &event, Schedule schedule, AppModel am,
                                PlatformModel pm, NodeOrigin origin) {
    node(from);
    const std::pair<NodeId, ContextWord> key{from, encode_context_word(event)};
    if (edges_.contains(key))
        throw KeyConflictError("edge " + to_hex(key.second) + " already leaves node " + std::to_string(from));
    NodeId target;
    if (const auto existing = find_schedule(schedule)) {
        if (reaches(*existing, from))
            throw GraphCycleError("linking node " + std::to_string(from) + " to " + std::to_string(*existing) +
                                  " would close a cycle");
        target = *existing;
    } else {
        target = static_cast<NodeId>(nodes_.size());
        nodes_.push_back({std::move(schedule), origin, std::move(am), std::move(pm)});
    }
    edges_.emplace(key, target);
    return target;
}

std::pair<Schedule, std::pair<AppModel, PlatformModel>> expand(const MultiScheduleGraph::Node &node,
                                                               const ContextEvent &event) {
    auto models = apply_event(node.am, node.pm, event);
    const auto &[am2, pm2] = models;
    const auto prefix = fix_past(node.schedule, event.timestamp, am2, pm2);
    const auto priorities = infer_priorities(HeuristicInference{}, am2, pm2);
    Schedule s = reconstruct(am2, pm2, priorities, prefix);
    return {std::move(s), std::move(models)};
}

OfflineBuild build_offline_msg(const AppModel &am, const PlatformModel &pm,
                               const std::vector<ContextEvent> &catalog, int depth) {
    if (catalog.empty()) throw ConfigError("offline MSG needs a non-empty event catalog");
    if (depth < 0) throw ConfigError("offline MSG depth must be non-negative");
    const auto priorities = infer_priorities(HeuristicInference{}, am, pm);
    OfflineBuild out{MultiScheduleGraph(reconstruct(am, pm, priorities), am, pm), {}};

    std::vector<NodeId> frontier{0};
    for (int level = 0; level < depth && !frontier.empty(); ++level) {
        std::vector<NodeId> next;
        for (NodeId from : frontier) {
            std::set<ContextWord> seen;
            for (const auto &event : catalog) {
                const ContextWord word = encode_context_word(event);
                if (!seen.insert(word).second) continue;
                try {
                    auto [schedule, models] = expand(out.graph.node(from), event);
                    const auto before = out.graph.node_count();
                    const NodeId target = out.graph.link(from, event, std::move(schedule), std::move(models.first),
                                                         std::move(models.second), NodeOrigin::offline);
                    if (out.graph.node_count() > before) next.push_back(target);
                } catch (const Error &e) {
                    out.pruned.push_back({from, word, e.what()});
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

std::optional<NodeId> transition(const MultiScheduleGraph &g, NodeId from, const ContextEvent &event) {
    return g.transition(from, event);
}

NodeId insert_discovered(MultiScheduleGraph &g, NodeId from, const ContextEvent &event, const Schedule &schedule,
                         const AppModel &am, const PlatformModel &pm) {
    const auto violations = safety_check(schedule, am, pm);
    if (!violations.empty())
        throw UnsafeScheduleError("rejecting discovered schedule: " + violations.front().detail);
    return g.link(from, event, schedule, am, pm, NodeOrigin::online_discovered);
}

} // namespace ttms
