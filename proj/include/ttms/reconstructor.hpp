#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ttms/priorities.hpp"
#include "ttms/routing.hpp"
#include "ttms/schedule.hpp"

namespace ttms {

/// The part of a previous schedule that survives a context event at `event_time`.
struct FrozenPrefix {
    Tick event_time = 0;
    /// Completed tasks plus tasks in flight on hardware that is still available.
    std::map<TaskId, TaskEntry> tasks;
    /// Messages already consumed by a frozen receiver.
    std::map<MsgId, MessageEntry> messages;
    /// Messages already injected towards a pending receiver over available hardware. They are
    /// kept only if the receiver stays on the same end system.
    std::map<MsgId, MessageEntry> in_flight;
    std::set<TaskId> pending;
};

struct RecoverySnapshot;

/// Entries that started before `event_time` (or ended by it) are frozen; every other task is pending.
FrozenPrefix fix_past(const Schedule &previous, Tick event_time);

/// As above, checked against the post-event platform: tasks in flight on failed end systems become
/// pending, and a completed task on a failed end system is re-run when a pending task still needs
/// one of its messages.
FrozenPrefix fix_past(const Schedule &previous, Tick event_time, const AppModel &am, const PlatformModel &pm);
FrozenPrefix fix_past(const RecoverySnapshot &snapshot, const AppModel &am, const PlatformModel &pm);

struct ReconstructOptions {
    /// Length of the intermediate phase after an event before pending work may start.
    Tick recovery_delay = 0;
};

/// List scheduling in descending temporal priority over the pending tasks of `prefix`.
///
/// Each pending task goes to its spatial target at the earliest tick that respects the event time,
/// predecessor completion, inbound message arrival and the end system's last finish time.
Schedule reconstruct(const AppModel &am, const PlatformModel &pm, const PriorityAssignment &priorities,
                     const FrozenPrefix &prefix, const ReconstructOptions &options = {});

/// From scratch when `recovery` is null; otherwise resumes from the snapshot, whose tick must equal
/// `event_time`.
Schedule reconstruct(const AppModel &am, const PlatformModel &pm, const PriorityAssignment &priorities,
                     Tick event_time = 0, const RecoverySnapshot *recovery = nullptr,
                     const ReconstructOptions &options = {});

/// Allocates one message from `tx` to a receiver on `rx_es`, injecting no earlier than
/// max(tx.end, lower_bound). Reserves the link slots in `occupancy`.
MessageEntry allocate_message(const Message &m, const TaskEntry &tx, HwId rx_es, Tick lower_bound,
                              const Router &router, LinkOccupancy &occupancy);

/// Timetable for every message whose endpoints are placed in `partial` but which has no entry
/// yet, in message-id order. Existing entries of `partial` keep their link slots.
std::map<MsgId, MessageEntry> allocate_messages(const Schedule &partial, const AppModel &am,
                                                const PlatformModel &pm, Tick lower_bound = 0);

} // namespace ttms
