#include "ttms/routing.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "ttms/errors.hpp"

namespace ttms {

Router::Router(const PlatformModel &pm) {
    std::map<HwId, std::vector<std::pair<HwId, HwId>>> adjacency;
    for (HwId l : pm.links(true)) {
        const auto &link = pm.unit(l);
        if (!pm.is_available(link.a) || !pm.is_available(link.b)) continue;
        adjacency[link.a].emplace_back(link.b, l);
        adjacency[link.b].emplace_back(link.a, l);
    }
    for (auto &[n, adj] : adjacency) std::sort(adj.begin(), adj.end());

    for (HwId src : pm.end_systems(true)) {
        routes_[{src, src}] = {};
        std::map<HwId, std::pair<HwId, HwId>> parent; // node -> (previous node, link)
        std::deque<HwId> queue{src};
        parent[src] = {-1, -1};
        while (!queue.empty()) {
            const HwId u = queue.front();
            queue.pop_front();
            if (u != src && pm.unit(u).kind == HardwareKind::end_system) continue;
            for (const auto &[v, l] : adjacency[u]) {
                if (parent.contains(v)) continue;
                parent[v] = {u, l};
                queue.push_back(v);
            }
        }
        for (const auto &[node, pl] : parent) {
            if (node == src || pm.unit(node).kind != HardwareKind::end_system) continue;
            std::vector<HwId> links;
            for (HwId cur = node; cur != src; cur = parent[cur].first) links.push_back(parent[cur].second);
            std::reverse(links.begin(), links.end());
            routes_[{src, node}] = std::move(links);
        }
    }
}

std::optional<std::vector<HwId>> Router::route(HwId from, HwId to) const {
    const auto it = routes_.find({from, to});
    if (it == routes_.end()) return std::nullopt;
    return it->second;
}

std::vector<HwId> route_nodes(const PlatformModel &pm, HwId from, const std::vector<HwId> &links) {
    std::vector<HwId> nodes{from};
    for (HwId l : links) {
        if (!pm.contains(l) || pm.unit(l).kind != HardwareKind::link)
            throw ModelError("route hop " + std::to_string(l) + " is not a link");
        const auto &link = pm.unit(l);
        const HwId cur = nodes.back();
        if (link.a == cur) nodes.push_back(link.b);
        else if (link.b == cur) nodes.push_back(link.a);
        else throw ModelError("route hop " + std::to_string(l) + " does not continue from node " + std::to_string(cur));
    }
    return nodes;
}

Tick LinkOccupancy::earliest_start(const std::vector<HwId> &route, Tick hop_duration, Tick lower_bound) const {
    Tick start = lower_bound;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t k = 0; k < route.size() && !moved; ++k) {
            const auto it = slots_.find(route[k]);
            if (it == slots_.end()) continue;
            const Tick offset = static_cast<Tick>(k) * hop_duration;
            const Tick lo = start + offset, hi = lo + hop_duration;
            for (const auto &s : it->second) {
                if (s.start < hi && lo < s.end) {
                    start = s.end - offset;
                    moved = true;
                    break;
                }
            }
        }
    }
    return start;
}

void LinkOccupancy::reserve(const std::vector<HwId> &route, Tick hop_duration, Tick start, MsgId msg) {
    for (std::size_t k = 0; k < route.size(); ++k) {
        const Tick lo = start + static_cast<Tick>(k) * hop_duration;
        auto &v = slots_[route[k]];
        v.push_back({lo, lo + hop_duration, msg});
        std::sort(v.begin(), v.end(), [](const Slot &a, const Slot &b) {
            return std::tie(a.start, a.end, a.msg) < std::tie(b.start, b.end, b.msg);
        });
    }
}

} // namespace ttms
