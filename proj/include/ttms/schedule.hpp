#pragma once

#include <map>
#include <string>
#include <vector>

#include "ttms/models.hpp"

namespace ttms {

struct TaskEntry {
    HwId es = 0;
    Tick start = 0;
    Tick end = 0;

    bool operator==(const TaskEntry &) const = default;
};

struct MessageEntry {
    TaskId tx_task = 0;
    TaskId rx_task = 0;
    HwId tx_es = 0;
    HwId rx_es = 0;
    /// Link ids, first hop first. Empty for co-located endpoints.
    std::vector<HwId> route;
    Tick start = 0;
    Tick end = 0;

    bool operator==(const MessageEntry &) const = default;
};

/// A complete task placement and message timetable.
///
/// Entries starting before `active_from` are history carried over from the schedule that was
/// active when a context event struck; they keep their recorded placement and duration.
struct Schedule {
    std::map<TaskId, TaskEntry> tasks;
    std::map<MsgId, MessageEntry> messages;
    Tick makespan = 0;
    Tick active_from = 0;
    double power_factor = 1.0;
    /// End systems available when the schedule was built.
    std::vector<HwId> end_systems;

    /// Equality of the task and message timetables only.
    friend bool operator==(const Schedule &a, const Schedule &b) {
        return a.tasks == b.tasks && a.messages == b.messages;
    }
};

enum class ViolationKind {
    missing_entry,
    unknown_entry,
    bad_duration,
    unavailable_hardware,
    precedence,
    es_overlap,
    message_route,
    link_collision,
    makespan,
};

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

/// Every broken schedule invariant; empty iff the schedule is valid for (am, pm).
std::vector<Violation> safety_check(const Schedule &s, const AppModel &am, const PlatformModel &pm);

enum class ProfileKind { makespan, workload, energy };

std::string to_string(ProfileKind kind);
ProfileKind parse_profile_kind(const std::string &name);

struct EvaluationProfile {
    ProfileKind kind = ProfileKind::makespan;
    Tick deadline = 1;
};

struct EvaluationReport {
    double metric = 0.0;
    double reward = 0.0;
    Tick makespan = 0;
    bool deadline_met = false;
    std::map<HwId, Tick> busy;
};

/// Per-ES busy time over the schedule's available end systems.
std::map<HwId, Tick> busy_times(const Schedule &s);

/// makespan: metric = makespan; workload: population std-dev of busy time over available ES;
/// energy: sum of task durations times the power factor. reward = -metric.
/// Throws UnsafeScheduleError if safety_check reports anything.
EvaluationReport evaluate(const Schedule &s, const AppModel &am, const PlatformModel &pm,
                          const EvaluationProfile &profile);
/// Same as evaluate() without the safety gate.
EvaluationReport evaluate_unchecked(const Schedule &s, const EvaluationProfile &profile);

/// Finite reward assigned to infeasible or unsafe schedules: -10 * deadline.
double penalty_reward(const EvaluationProfile &profile);

/// Table IV message dataframe: Message ID, Tx Task, Rx Task, Tx End System, Rx End System, Start Time, End Time.
std::string message_table_csv(const Schedule &s);
std::string task_table_csv(const Schedule &s, const AppModel &am);
/// "ES<n>" with 1-based numbering over end-system ids.
std::string es_label(HwId es);

} // namespace ttms
