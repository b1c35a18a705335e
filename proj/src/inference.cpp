#include "ttms/inference.hpp"

#include <cstring>
#include <limits>

#include "ttms/errors.hpp"
#include "ttms/reconstructor.hpp"

namespace ttms {

SpatialInference::SpatialInference(Mlp net, FeatureLayout layout) : net_(std::move(net)), layout_(layout) {
    if (net_.input_size() != layout_.size() || net_.output_size() != layout_.spatial_outputs())
        throw ArchitectureMismatchError("network shape does not match the feature layout");
}

SpatialInference SpatialInference::random(const std::vector<int> &hidden, FeatureLayout layout, std::uint64_t seed) {
    std::vector<int> sizes{layout.size()};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(layout.spatial_outputs());
    return SpatialInference(Mlp::random(sizes, seed), layout);
}

std::map<TaskId, HwId> SpatialInference::assign(const Eigen::VectorXd &features, const AppModel &am,
                                                const PlatformModel &pm) const {
    const auto tasks = task_slots(am, layout_);
    const auto es = es_slots(pm, layout_);
    const Eigen::VectorXd scores = forward(net_, features);
    std::map<TaskId, HwId> out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        HwId pick = -1;
        for (std::size_t j = 0; j < es.size(); ++j) {
            if (!pm.is_available(es[j])) continue;
            const double v = scores(static_cast<Eigen::Index>(i * static_cast<std::size_t>(layout_.max_es) + j));
            if (pick < 0 || v > best) {
                best = v;
                pick = es[j];
            }
        }
        if (pick < 0) throw PlatformExhaustedError("no available end system");
        out[tasks[i]] = pick;
    }
    return out;
}

PriorityAssignment SpatialInference::infer(const AppModel &am, const PlatformModel &pm,
                                           const ContextModel &window) const {
    const ContextEvent event = window.events.empty() ? ContextEvent{} : window.events.back();
    PriorityAssignment p;
    p.temporal = b_level(am);
    p.spatial = assign(context_features(am, pm, event, {}, layout_), am, pm);
    return p;
}

double instance_makespan(const InferenceAdapter &adapter, const ValidationInstance &instance) {
    try {
        const auto p = infer_priorities(adapter, instance.am, instance.pm, ContextModel{{instance.event}});
        return static_cast<double>(reconstruct(instance.am, instance.pm, p).makespan);
    } catch (const Error &) {
        return 10.0 * static_cast<double>(instance.am.deadline);
    }
}

double validation_makespan(const InferenceAdapter &adapter, const std::vector<ValidationInstance> &validation) {
    if (validation.empty()) throw EmptyValidationSetError("validation set is empty");
    double total = 0.0;
    for (const auto &v : validation) total += instance_makespan(adapter, v);
    return total / static_cast<double>(validation.size());
}

CommitResult commit_if_improved(const SpatialInference &candidate, const SpatialInference &incumbent,
                                const std::vector<ValidationInstance> &validation) {
    CommitDecision d;
    d.candidate_metric = validation_makespan(candidate, validation);
    d.incumbent_metric = validation_makespan(incumbent, validation);
    d.committed = d.candidate_metric <= d.incumbent_metric;
    return {d.committed ? candidate : incumbent, d};
}

namespace {

void put_u32(std::ostream &out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 24)};
    out.write(b, 4);
}

std::uint32_t get_u32(std::istream &in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char *>(b), 4)) throw FormatError("truncated MLP stream");
    return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
}

void put_f64(std::ostream &out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(bits >> (8 * i));
    out.write(b, 8);
}

double get_f64(std::istream &in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char *>(b), 8)) throw FormatError("truncated MLP stream");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{b[i]} << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

} // namespace

void save_mlp(std::ostream &out, const Mlp &net) {
    out.write(mlp_magic, 4);
    put_u32(out, mlp_format_version);
    put_u32(out, static_cast<std::uint32_t>(net.sizes().size()));
    for (int s : net.sizes()) put_u32(out, static_cast<std::uint32_t>(s));
    const auto p = net.parameters();
    for (Eigen::Index i = 0; i < p.size(); ++i) put_f64(out, p(i));
}

Mlp load_mlp(std::istream &in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, mlp_magic, 4) != 0) throw FormatError("not an MLP parameter file");
    if (const auto v = get_u32(in); v != mlp_format_version)
        throw FormatError("unsupported MLP format version " + std::to_string(v));
    const auto n = get_u32(in);
    if (n < 2 || n > 64) throw FormatError("implausible layer count");
    std::vector<int> sizes;
    for (std::uint32_t i = 0; i < n; ++i) sizes.push_back(static_cast<int>(get_u32(in)));
    Mlp net(sizes);
    Eigen::VectorXd p(net.parameter_count());
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = get_f64(in);
    net.set_parameters(p);
    return net;
}

} // namespace ttms
