#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ttms/models.hpp"

namespace ttms {

/// All-pairs end-system routes over the available platform graph.
///
/// Routes are lists of link ids with minimum hop count; only routers forward, end systems are
/// endpoints. Among equal-length routes the breadth-first search visiting lower node ids first wins.
class Router {
  public:
    explicit Router(const PlatformModel &pm);

    /// Empty route for from == to; nullopt when unreachable.
    std::optional<std::vector<HwId>> route(HwId from, HwId to) const;

  private:
    std::map<std::pair<HwId, HwId>, std::vector<HwId>> routes_;
};

/// Node sequence visited by a link route starting at `from`. Throws ModelError if links do not chain.
std::vector<HwId> route_nodes(const PlatformModel &pm, HwId from, const std::vector<HwId> &links);

/// Store-and-forward link reservations: hop k of a message starting at s holds its link during
/// [s + k*d, s + (k+1)*d).
class LinkOccupancy {
  public:
    struct Slot {
        Tick start;
        Tick end;
        MsgId msg;
    };

    Tick earliest_start(const std::vector<HwId> &route, Tick hop_duration, Tick lower_bound) const;
    void reserve(const std::vector<HwId> &route, Tick hop_duration, Tick start, MsgId msg);
    const std::map<HwId, std::vector<Slot>> &slots() const { return slots_; }

  private:
    std::map<HwId, std::vector<Slot>> slots_;
};

} // namespace ttms
