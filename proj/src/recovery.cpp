#include "ttms/recovery.hpp"

#include <algorithm>

#include "ttms/errors.hpp"

namespace ttms {

RecoverySnapshot take_snapshot(const Schedule &s, Tick t) {
    RecoverySnapshot snap;
    snap.tick = t;
    for (const auto &[tid, e] : s.tasks) {
        if (!started_by(e.start, e.end, t)) continue;
        snap.tasks.emplace(tid, e);
        if (e.end <= t) snap.completed.insert(tid);
        auto &front = snap.es_fronts[e.es];
        front = std::max(front, e.end);
    }
    for (const auto &[mid, m] : s.messages) {
        if (!started_by(m.start, m.end, t)) continue;
        snap.messages.emplace(mid, m);
        if (m.route.empty()) continue;
        const Tick hop = (m.end - m.start) / static_cast<Tick>(m.route.size());
        for (std::size_t k = 0; k < m.route.size(); ++k) {
            const Tick lo = m.start + static_cast<Tick>(k) * hop;
            snap.link_occupancy[m.route[k]].emplace_back(lo, lo + hop);
        }
    }
    for (auto &[link, v] : snap.link_occupancy) std::sort(v.begin(), v.end());
    return snap;
}

RecoveryLog::RecoveryLog(const Schedule &s) : horizon_(s.makespan) {
    std::vector<Tick> ticks{0};
    auto add = [&ticks](Tick start, Tick end) {
        ticks.push_back(end);
        if (start < end) ticks.push_back(start + 1);
    };
    for (const auto &[tid, e] : s.tasks) add(e.start, e.end);
    for (const auto &[mid, m] : s.messages) add(m.start, m.end);
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
    for (Tick t : ticks)
        if (t >= 0 && t <= horizon_) snapshots_.push_back(take_snapshot(s, t));
}

RecoverySnapshot RecoveryLog::restore(Tick t) const {
    if (t < 0 || t > horizon_ || snapshots_.empty())
        throw OutOfRangeError("tick " + std::to_string(t) + " outside logged range [0, " + std::to_string(horizon_) + "]");
    const auto it = std::upper_bound(snapshots_.begin(), snapshots_.end(), t,
                                     [](Tick v, const RecoverySnapshot &s) { return v < s.tick; });
    RecoverySnapshot snap = *std::prev(it);
    snap.tick = t;
    return snap;
}

} // namespace ttms
