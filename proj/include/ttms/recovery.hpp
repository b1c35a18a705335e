#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ttms/schedule.hpp"

namespace ttms {

/// Reconstructor state at one tick: entries that completed by the tick plus those in flight.
struct RecoverySnapshot {
    Tick tick = 0;
    std::map<TaskId, TaskEntry> tasks;
    std::map<MsgId, MessageEntry> messages;
    std::set<TaskId> completed;
    /// Latest finish time per end system among the included tasks.
    std::map<HwId, Tick> es_fronts;
    /// Hop reservations per link among the included messages.
    std::map<HwId, std::vector<std::pair<Tick, Tick>>> link_occupancy;

    bool operator==(const RecoverySnapshot &) const = default;
};

/// True when an entry spanning [start, end) has begun or finished by tick t.
inline bool started_by(Tick start, Tick end, Tick t) { return end <= t || start < t; }

/// State of `s` at tick t, computed directly.
RecoverySnapshot take_snapshot(const Schedule &s, Tick t);

/// Per-tick log of a schedule's reconstructor state. Snapshots are stored only at ticks where the
/// state changes; every tick in [0, horizon] can be restored.
class RecoveryLog {
  public:
    RecoveryLog() = default;
    explicit RecoveryLog(const Schedule &s);

    Tick horizon() const { return horizon_; }
    const std::vector<RecoverySnapshot> &snapshots() const { return snapshots_; }

    /// Throws OutOfRangeError when t is outside [0, horizon].
    RecoverySnapshot restore(Tick t) const;

  private:
    Tick horizon_ = 0;
    std::vector<RecoverySnapshot> snapshots_;
};

inline RecoverySnapshot restore(const RecoveryLog &log, Tick t) { return log.restore(t); }

} // namespace ttms
