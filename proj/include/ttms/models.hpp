#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ttms/context.hpp"
#include "ttms/types.hpp"

namespace ttms {

struct Task {
    TaskId id = 0;
    Tick wcet = 1;
    std::set<TaskId> predecessors;
    // Dataframe columns filled in once a schedule exists.
    std::optional<double> temporal_priority;
    std::optional<HwId> assigned_es;
    std::optional<Tick> start_time;

    bool operator==(const Task &) const = default;
};

struct Message {
    MsgId id = 0;
    TaskId tx_task = 0;
    TaskId rx_task = 0;
    Tick size = 1;
    std::optional<Tick> inj_time;
    std::vector<HwId> route;
    std::optional<HwId> tx_es;
    std::optional<HwId> rx_es;
    std::optional<Tick> start_time;
    std::optional<Tick> end_time;

    bool operator==(const Message &) const = default;
};

struct AppModel {
    std::map<TaskId, Task> tasks;
    std::map<MsgId, Message> messages;
    Tick deadline = 1;

    const Task &task(TaskId id) const;
    /// Throws ModelError / CycleDetectedError on broken invariants.
    void validate() const;

    bool operator==(const AppModel &) const = default;
};

/// Combined precedence graph: declared predecessors plus message edges.
class TaskGraph {
  public:
    /// Throws CycleDetectedError when the graph has a cycle.
    explicit TaskGraph(const AppModel &am);

    const std::vector<TaskId> &predecessors(TaskId id) const { return preds_.at(id); }
    const std::vector<TaskId> &successors(TaskId id) const { return succs_.at(id); }
    const std::vector<MsgId> &inbound(TaskId id) const { return inbound_.at(id); }
    const std::vector<MsgId> &outbound(TaskId id) const { return outbound_.at(id); }
    /// Topological order, ties by lowest task id.
    const std::vector<TaskId> &topological_order() const { return order_; }

  private:
    std::map<TaskId, std::vector<TaskId>> preds_, succs_;
    std::map<TaskId, std::vector<MsgId>> inbound_, outbound_;
    std::vector<TaskId> order_;
};

enum class HardwareKind { end_system, router, link };

struct Hardware {
    HwId id = 0;
    HardwareKind kind = HardwareKind::end_system;
    bool available = true;
    // Link endpoints (node ids); unused for nodes.
    HwId a = -1;
    HwId b = -1;

    bool operator==(const Hardware &) const = default;
};

/// End systems, routers and links in one id space: ES first, then routers, then links.
struct PlatformModel {
    std::vector<Hardware> units;
    double frequency_scale = 1.0;

    /// Links are pairs of node indices: [0, n_es) are end systems, [n_es, n_es + n_routers) routers.
    static PlatformModel build(int n_end_systems, int n_routers,
                               const std::vector<std::pair<int, int>> &links);

    bool contains(HwId id) const { return id >= 0 && id < static_cast<HwId>(units.size()); }
    const Hardware &unit(HwId id) const;
    bool is_available(HwId id) const { return unit(id).available; }
    bool is_end_system(HwId id) const { return contains(id) && unit(id).kind == HardwareKind::end_system; }

    std::vector<HwId> end_systems(bool available_only = false) const;
    std::vector<HwId> routers(bool available_only = false) const;
    std::vector<HwId> links(bool available_only = false) const;

    void validate() const;

    bool operator==(const PlatformModel &) const = default;
};

/// AM' = AM (+) dAM(slack): wcet of the affected task scaled by (1 - value/8), rounded up, floor 1.
AppModel apply_slack(const AppModel &am, const ContextEvent &event);
/// PM' = PM (+) dPM(failure): clears availability of hw_id. Idempotent.
PlatformModel apply_failure(const PlatformModel &pm, const ContextEvent &event);
/// Frequency scaling by f = 1 - value/8: PM' records f, every wcet becomes ceil(wcet / f).
std::pair<AppModel, PlatformModel> apply_mode_change(const AppModel &am, const PlatformModel &pm,
                                                     const ContextEvent &event);
/// Dispatches on event.kind; kind none leaves both models unchanged.
std::pair<AppModel, PlatformModel> apply_event(const AppModel &am, const PlatformModel &pm,
                                               const ContextEvent &event);

} // namespace ttms
