#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ttms/context.hpp"
#include "ttms/models.hpp"
#include "ttms/schedule.hpp"

namespace ttms {

using NodeId = int;

enum class NodeOrigin { offline, online_discovered };

std::string to_string(NodeOrigin origin);

/// Schedules as nodes, context events (keyed by their 32-bit word) as edges. Node ids are
/// insertion ordered; the root schedule is node 0.
class MultiScheduleGraph {
  public:
    struct Node {
        Schedule schedule;
        NodeOrigin origin = NodeOrigin::offline;
        /// Models the schedule was built for; used to replay outgoing edges.
        AppModel am;
        PlatformModel pm;
    };

    MultiScheduleGraph() = default;
    MultiScheduleGraph(Schedule root, AppModel am, PlatformModel pm);

    /// Rebuilds a stored graph. Throws UnknownNodeError for dangling edges and GraphCycleError.
    static MultiScheduleGraph assemble(std::vector<Node> nodes, const std::map<std::pair<NodeId, ContextWord>, NodeId> &edges);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    NodeId root() const { return 0; }

    /// Throws UnknownNodeError.
    const Node &node(NodeId id) const;
    const std::map<std::pair<NodeId, ContextWord>, NodeId> &edges() const { return edges_; }

    /// Target of the edge (node, event), or nullopt on a miss. Throws UnknownNodeError.
    std::optional<NodeId> transition(NodeId from, const ContextEvent &event) const;

    std::optional<NodeId> find_schedule(const Schedule &s) const;
    /// True when `target` can reach `from` (or equals it), i.e. linking from -> target closes a cycle.
    bool reaches(NodeId target, NodeId from) const;

    /// Links (from, event) to a node holding `schedule`, creating it if no equal schedule is stored.
    /// Throws UnknownNodeError, KeyConflictError for an existing key, GraphCycleError when the
    /// equal schedule is an ancestor of `from`.
    NodeId link(NodeId from, const ContextEvent &event, Schedule schedule, AppModel am, PlatformModel pm,
                NodeOrigin origin);

  private:
    std::vector<Node> nodes_;
    std::map<std::pair<NodeId, ContextWord>, NodeId> edges_;
};

struct PrunedBranch {
    NodeId from;
    ContextWord event;
    std::string reason;
};

struct OfflineBuild {
    MultiScheduleGraph graph;
    std::vector<PrunedBranch> pruned;
};

/// Breadth-first expansion from the heuristic schedule of (am, pm): for every node above `depth`
/// and every catalog event, apply the event, fix the past at its timestamp, reconstruct with the
/// built-in inference and link the result. Failing branches are pruned and recorded.
OfflineBuild build_offline_msg(const AppModel &am, const PlatformModel &pm,
                               const std::vector<ContextEvent> &catalog, int depth);

/// Successor schedule of `node` under `event` using the built-in inference. Throws on failure.
std::pair<Schedule, std::pair<AppModel, PlatformModel>> expand(const MultiScheduleGraph::Node &node,
                                                               const ContextEvent &event);

std::optional<NodeId> transition(const MultiScheduleGraph &g, NodeId from, const ContextEvent &event);

/// Stores an online-discovered schedule reached from `from` under `event`. The schedule must pass
/// safety_check against (am, pm) or UnsafeScheduleError is thrown.
NodeId insert_discovered(MultiScheduleGraph &g, NodeId from, const ContextEvent &event, const Schedule &schedule,
                         const AppModel &am, const PlatformModel &pm);

} // namespace ttms
