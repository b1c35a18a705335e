#include "ttms/models.hpp"

#include <algorithm>
#include <queue>

#include "ttms/errors.hpp"

namespace ttms {

const Task &AppModel::task(TaskId id) const {
    const auto it = tasks.find(id);
    if (it == tasks.end()) throw UnknownTaskError("unknown task " + std::to_string(id));
    return it->second;
}

void AppModel::validate() const {
    if (deadline < 1) throw ModelError("deadline must be positive");
    for (const auto &[id, t] : tasks) {
        if (t.id != id) throw ModelError("task key mismatch for " + std::to_string(id));
        if (t.wcet < 1) throw ModelError("task " + std::to_string(id) + " has wcet < 1");
        for (TaskId p : t.predecessors)
            if (!tasks.contains(p))
                throw ModelError("task " + std::to_string(id) + " has unknown predecessor " + std::to_string(p));
        if (t.start_time && !t.assigned_es)
            throw ModelError("task " + std::to_string(id) + " has a start time but no end system");
    }
    for (const auto &[id, m] : messages) {
        if (m.id != id) throw ModelError("message key mismatch for " + std::to_string(id));
        if (!tasks.contains(m.tx_task) || !tasks.contains(m.rx_task))
            throw ModelError("message " + std::to_string(id) + " references an unknown task");
        if (m.tx_task == m.rx_task) throw ModelError("message " + std::to_string(id) + " is a self loop");
        if (m.size < 1) throw ModelError("message " + std::to_string(id) + " has size < 1");
    }
    TaskGraph graph(*this);
}

TaskGraph::TaskGraph(const AppModel &am) {
    for (const auto &[id, t] : am.tasks) {
        preds_[id];
        succs_[id];
        inbound_[id];
        outbound_[id];
    }
    auto add_edge = [this](TaskId from, TaskId to) {
        auto &p = preds_[to];
        if (std::find(p.begin(), p.end(), from) == p.end()) {
            p.push_back(from);
            succs_[from].push_back(to);
        }
    };
    for (const auto &[id, t] : am.tasks)
        for (TaskId p : t.predecessors) {
            if (!am.tasks.contains(p)) throw ModelError("unknown predecessor " + std::to_string(p));
            add_edge(p, id);
        }
    for (const auto &[id, m] : am.messages) {
        if (!am.tasks.contains(m.tx_task) || !am.tasks.contains(m.rx_task))
            throw ModelError("message " + std::to_string(id) + " references an unknown task");
        add_edge(m.tx_task, m.rx_task);
        inbound_[m.rx_task].push_back(id);
        outbound_[m.tx_task].push_back(id);
    }
    for (auto &[id, v] : preds_) std::sort(v.begin(), v.end());
    for (auto &[id, v] : succs_) std::sort(v.begin(), v.end());

    std::map<TaskId, std::size_t> indegree;
    std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
    for (const auto &[id, p] : preds_) {
        indegree[id] = p.size();
        if (p.empty()) ready.push(id);
    }
    while (!ready.empty()) {
        const TaskId id = ready.top();
        ready.pop();
        order_.push_back(id);
        for (TaskId s : succs_[id])
            if (--indegree[s] == 0) ready.push(s);
    }
    if (order_.size() != am.tasks.size()) throw CycleDetectedError("task graph contains a cycle");
}

PlatformModel PlatformModel::build(int n_end_systems, int n_routers,
                                   const std::vector<std::pair<int, int>> &links) {
    if (n_end_systems < 0 || n_routers < 0) throw ModelError("negative hardware count");
    PlatformModel pm;
    const int nodes = n_end_systems + n_routers;
    for (int i = 0; i < nodes; ++i)
        pm.units.push_back({i, i < n_end_systems ? HardwareKind::end_system : HardwareKind::router, true});
    for (const auto &[a, b] : links) {
        if (a < 0 || b < 0 || a >= nodes || b >= nodes || a == b)
            throw ModelError("link endpoints out of range");
        pm.units.push_back({static_cast<HwId>(pm.units.size()), HardwareKind::link, true, a, b});
    }
    pm.validate();
    return pm;
}

const Hardware &PlatformModel::unit(HwId id) const {
    if (!contains(id)) throw UnknownHardwareError("unknown hardware id " + std::to_string(id));
    return units[static_cast<std::size_t>(id)];
}

namespace {
std::vector<HwId> filter(const std::vector<Hardware> &units, HardwareKind kind, bool available_only) {
    std::vector<HwId> out;
    for (const auto &u : units)
        if (u.kind == kind && (!available_only || u.available)) out.push_back(u.id);
    return out;
}
} // namespace

std::vector<HwId> PlatformModel::end_systems(bool available_only) const {
    return filter(units, HardwareKind::end_system, available_only);
}
std::vector<HwId> PlatformModel::routers(bool available_only) const {
    return filter(units, HardwareKind::router, available_only);
}
std::vector<HwId> PlatformModel::links(bool available_only) const {
    return filter(units, HardwareKind::link, available_only);
}

void PlatformModel::validate() const {
    if (units.size() > 64) throw ModelError("platform exceeds the 6-bit hardware id space");
    int rank = 0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const auto &u = units[i];
        if (u.id != static_cast<HwId>(i)) throw ModelError("hardware ids must be dense and ordered");
        const int r = static_cast<int>(u.kind);
        if (r < rank) throw ModelError("hardware must be ordered end systems, routers, links");
        rank = r;
        if (u.kind == HardwareKind::link) {
            if (!contains(u.a) || !contains(u.b) || unit(u.a).kind == HardwareKind::link ||
                unit(u.b).kind == HardwareKind::link)
                throw ModelError("link " + std::to_string(u.id) + " has invalid endpoints");
        }
    }
    if (!(frequency_scale > 0.0 && frequency_scale <= 1.0)) throw ModelError("frequency scale out of (0, 1]");
}

AppModel apply_slack(const AppModel &am, const ContextEvent &event) {
    if (event.kind != ContextKind::slack) throw ModelError("apply_slack expects a slack event");
    const TaskId id = event.affected_task;
    if (!am.tasks.contains(id)) throw UnknownTaskError("slack on unknown task " + std::to_string(id));
    AppModel out = am;
    auto &t = out.tasks.at(id);
    const Tick keep = 8 - (event.value & 7);
    t.wcet = std::max<Tick>(1, (t.wcet * keep + 7) / 8);
    return out;
}

PlatformModel apply_failure(const PlatformModel &pm, const ContextEvent &event) {
    if (event.kind != ContextKind::failure) throw ModelError("apply_failure expects a failure event");
    const HwId id = event.hw_id;
    if (!pm.contains(id)) throw UnknownHardwareError("failure of unknown hardware " + std::to_string(id));
    PlatformModel out = pm;
    out.units[static_cast<std::size_t>(id)].available = false;
    if (out.end_systems(true).empty()) throw PlatformExhaustedError("no available end system remains");
    return out;
}

std::pair<AppModel, PlatformModel> apply_mode_change(const AppModel &am, const PlatformModel &pm,
                                                     const ContextEvent &event) {
    if (event.kind != ContextKind::mode_change) throw ModelError("apply_mode_change expects a mode change");
    const Tick keep = 8 - (event.value & 7);
    if (keep == 8) return {am, pm};
    AppModel am2 = am;
    PlatformModel pm2 = pm;
    pm2.frequency_scale *= static_cast<double>(keep) / 8.0;
    for (auto &[id, t] : am2.tasks) t.wcet = (t.wcet * 8 + keep - 1) / keep;
    return {std::move(am2), std::move(pm2)};
}

std::pair<AppModel, PlatformModel> apply_event(const AppModel &am, const PlatformModel &pm,
                                               const ContextEvent &event) {
    switch (event.kind) {
    case ContextKind::slack: return {apply_slack(am, event), pm};
    case ContextKind::failure: return {am, apply_failure(pm, event)};
    case ContextKind::mode_change: return apply_mode_change(am, pm, event);
    default: return {am, pm};
    }
}

} // namespace ttms
