#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ttms/errors.hpp"

namespace ttms {

/// Fully connected network: rectifier on hidden layers, identity on the output layer.
template <typename Scalar>
class BasicMlp {
  public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BasicMlp() = default;

    /// Zero-initialised network with the given layer sizes (input, hidden..., output).
    explicit BasicMlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
        if (sizes_.size() < 2) throw ArchitectureMismatchError("an MLP needs at least input and output sizes");
        for (int s : sizes_)
            if (s < 1) throw ArchitectureMismatchError("layer sizes must be positive");
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            weights_.push_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
            biases_.push_back(Vector::Zero(sizes_[l + 1]));
        }
    }

    /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    static BasicMlp random(std::vector<int> sizes, std::uint64_t seed) {
        BasicMlp net(std::move(sizes));
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l < net.weights_.size(); ++l) {
            const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(net.sizes_[l]));
            std::uniform_real_distribution<Scalar> dist(-bound, bound);
            for (Eigen::Index r = 0; r < net.weights_[l].rows(); ++r)
                for (Eigen::Index c = 0; c < net.weights_[l].cols(); ++c) net.weights_[l](r, c) = dist(rng);
            for (Eigen::Index r = 0; r < net.biases_[l].size(); ++r) net.biases_[l](r) = dist(rng);
        }
        return net;
    }

    const std::vector<int> &sizes() const { return sizes_; }
    std::size_t layer_count() const { return weights_.size(); }
    int input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
    int output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }

    Matrix &weight(std::size_t l) { return weights_.at(l); }
    const Matrix &weight(std::size_t l) const { return weights_.at(l); }
    Vector &bias(std::size_t l) { return biases_.at(l); }
    const Vector &bias(std::size_t l) const { return biases_.at(l); }

    Eigen::Index parameter_count() const {
        Eigen::Index n = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
        return n;
    }

    /// Flattened per layer: weights row-major, then biases.
    Vector parameters() const {
        Vector out(parameter_count());
        Eigen::Index k = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
                for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) out(k++) = weights_[l](r, c);
            for (Eigen::Index r = 0; r < biases_[l].size(); ++r) out(k++) = biases_[l](r);
        }
        return out;
    }

    void set_parameters(const Vector &p) {
        if (p.size() != parameter_count()) throw DimensionMismatchError("parameter vector size mismatch");
        Eigen::Index k = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
                for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = p(k++);
            for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = p(k++);
        }
    }

    bool all_finite() const { return parameters().allFinite(); }

    friend bool operator==(const BasicMlp &a, const BasicMlp &b) {
        if (a.sizes_ != b.sizes_) return false;
        for (std::size_t l = 0; l < a.weights_.size(); ++l)
            if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l]) return false;
        return true;
    }

  private:
    std::vector<int> sizes_;
    std::vector<Matrix> weights_;
    std::vector<Vector> biases_;
};

using Mlp = BasicMlp<double>;

/// Pre-activations of every layer for a batch (columns are samples); the last entry is the output.
template <typename Scalar>
std::vector<typename BasicMlp<Scalar>::Matrix> forward_trace(const BasicMlp<Scalar> &net,
                                                             const typename BasicMlp<Scalar>::Matrix &inputs) {
    if (inputs.rows() != net.input_size())
        throw DimensionMismatchError("input has " + std::to_string(inputs.rows()) + " rows, network expects " +
                                     std::to_string(net.input_size()));
    std::vector<typename BasicMlp<Scalar>::Matrix> pre;
    typename BasicMlp<Scalar>::Matrix act = inputs;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        typename BasicMlp<Scalar>::Matrix z = (net.weight(l) * act).colwise() + net.bias(l);
        act = l + 1 < net.layer_count() ? typename BasicMlp<Scalar>::Matrix(z.cwiseMax(Scalar(0))) : z;
        pre.push_back(std::move(z));
    }
    return pre;
}

template <typename Scalar>
typename BasicMlp<Scalar>::Matrix forward_batch(const BasicMlp<Scalar> &net,
                                                const typename BasicMlp<Scalar>::Matrix &inputs) {
    return forward_trace(net, inputs).back();
}

template <typename Scalar>
typename BasicMlp<Scalar>::Vector forward(const BasicMlp<Scalar> &net, const typename BasicMlp<Scalar>::Vector &x) {
    return forward_batch(net, typename BasicMlp<Scalar>::Matrix(x)).col(0);
}

/// One regression sample. An empty mask weights every output equally; otherwise only outputs with
/// non-zero mask contribute.
template <typename Scalar>
struct BasicSample {
    typename BasicMlp<Scalar>::Vector input;
    typename BasicMlp<Scalar>::Vector target;
    typename BasicMlp<Scalar>::Vector mask;
};

using Sample = BasicSample<double>;

struct TrainConfig {
    double learning_rate = 0.001;
    int iterations = 100;
};

template <typename Scalar>
struct LossAndGradient {
    Scalar loss = 0;
    typename BasicMlp<Scalar>::Vector gradient;
};

/// Masked mean squared error over all samples, sum(mask * (y - t)^2) / sum(mask), and its gradient
/// in parameters() order.
template <typename Scalar>
LossAndGradient<Scalar> loss_and_gradient(const BasicMlp<Scalar> &net, const std::vector<BasicSample<Scalar>> &samples) {
    using Matrix = typename BasicMlp<Scalar>::Matrix;
    const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
    const int in = net.input_size(), out = net.output_size();
    Matrix x(in, n), t(out, n), m(out, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto &s = samples[static_cast<std::size_t>(i)];
        if (s.input.size() != in || s.target.size() != out || (s.mask.size() != 0 && s.mask.size() != out))
            throw DimensionMismatchError("sample " + std::to_string(i) + " does not match the network shape");
        x.col(i) = s.input;
        t.col(i) = s.target;
        if (s.mask.size() == 0) m.col(i).setOnes();
        else m.col(i) = s.mask;
    }
    const auto pre = forward_trace(net, x);
    const Scalar weight = m.sum();
    LossAndGradient<Scalar> result;
    result.gradient = BasicMlp<Scalar>::Vector::Zero(net.parameter_count());
    if (n == 0 || weight <= Scalar(0)) return result;

    const Matrix err = pre.back() - t;
    result.loss = (m.array() * err.array().square()).sum() / weight;
    Matrix delta = (Scalar(2) / weight) * (m.array() * err.array()).matrix();

    std::vector<Matrix> dw(net.layer_count());
    std::vector<typename BasicMlp<Scalar>::Vector> db(net.layer_count());
    for (std::size_t l = net.layer_count(); l-- > 0;) {
        const Matrix act = l == 0 ? x : Matrix(pre[l - 1].cwiseMax(Scalar(0)));
        dw[l] = delta * act.transpose();
        db[l] = delta.rowwise().sum();
        if (l > 0) {
            Matrix back = net.weight(l).transpose() * delta;
            delta = (back.array() * (pre[l - 1].array() > Scalar(0)).template cast<Scalar>()).matrix();
        }
    }
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (Eigen::Index r = 0; r < dw[l].rows(); ++r)
            for (Eigen::Index c = 0; c < dw[l].cols(); ++c) result.gradient(k++) = dw[l](r, c);
        for (Eigen::Index r = 0; r < db[l].size(); ++r) result.gradient(k++) = db[l](r);
    }
    return result;
}

template <typename Scalar>
Scalar loss(const BasicMlp<Scalar> &net, const std::vector<BasicSample<Scalar>> &samples) {
    using Matrix = typename BasicMlp<Scalar>::Matrix;
    Scalar total = 0, weight = 0;
    for (const auto &s : samples) {
        const Matrix y = forward_batch(net, Matrix(s.input));
        if (s.target.size() != y.rows()) throw DimensionMismatchError("target size mismatch");
        for (Eigen::Index j = 0; j < y.rows(); ++j) {
            const Scalar w = s.mask.size() == 0 ? Scalar(1) : s.mask(j);
            total += w * (y(j, 0) - s.target(j)) * (y(j, 0) - s.target(j));
            weight += w;
        }
    }
    return weight > Scalar(0) ? total / weight : Scalar(0);
}

template <typename Scalar>
struct TrainResult {
    BasicMlp<Scalar> net;
    /// Loss before each update.
    std::vector<Scalar> losses;
};

/// Full-batch gradient descent on the masked mean squared error.
template <typename Scalar>
TrainResult<Scalar> train(const BasicMlp<Scalar> &net, const std::vector<BasicSample<Scalar>> &samples,
                          const TrainConfig &cfg) {
    if (!(cfg.learning_rate >= 0.0) || cfg.iterations < 0) throw ConfigError("invalid training configuration");
    TrainResult<Scalar> result{net, {}};
    if (cfg.iterations == 0) return result;
    if (samples.empty()) throw DimensionMismatchError("training needs at least one sample");
    result.losses.reserve(static_cast<std::size_t>(cfg.iterations));
    auto params = net.parameters();
    for (int it = 0; it < cfg.iterations; ++it) {
        const auto lg = loss_and_gradient(result.net, samples);
        if (!std::isfinite(static_cast<double>(lg.loss)) || !lg.gradient.allFinite())
            throw NonFiniteLossError("loss became non-finite at iteration " + std::to_string(it) +
                                     " (last finite loss " +
                                     (result.losses.empty() ? std::string("n/a") : std::to_string(result.losses.back())) +
                                     ", learning rate " + std::to_string(cfg.learning_rate) + ")");
        result.losses.push_back(lg.loss);
        params -= static_cast<Scalar>(cfg.learning_rate) * lg.gradient;
        result.net.set_parameters(params);
    }
    return result;
}

/// Largest relative deviation between the analytic gradient and central differences with step
/// h * max(1, |theta|). Entries where both gradients are below 1e-6 * max(1, loss) count as agreeing.
template <typename Scalar>
Scalar gradient_check(const BasicMlp<Scalar> &net, const BasicSample<Scalar> &sample, Scalar h = Scalar(1e-5)) {
    const std::vector<BasicSample<Scalar>> batch{sample};
    const auto lg = loss_and_gradient(net, batch);
    const Scalar floor = Scalar(1e-6) * std::max(Scalar(1), std::abs(lg.loss));
    auto params = net.parameters();
    BasicMlp<Scalar> probe = net;
    Scalar worst = 0;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const Scalar theta = params(i);
        const Scalar step = h * std::max(Scalar(1), std::abs(theta));
        params(i) = theta + step;
        probe.set_parameters(params);
        const Scalar up = loss(probe, batch);
        params(i) = theta - step;
        probe.set_parameters(params);
        const Scalar down = loss(probe, batch);
        params(i) = theta;
        const Scalar numeric = (up - down) / (Scalar(2) * step);
        const Scalar analytic = lg.gradient(i);
        const Scalar scale = std::max({std::abs(numeric), std::abs(analytic), floor});
        if (std::abs(numeric) < floor && std::abs(analytic) < floor) continue;
        worst = std::max(worst, std::abs(numeric - analytic) / scale);
    }
    return worst;
}

/// Smallest |pre-activation| over all hidden units for input x; distance to the nearest rectifier kink.
template <typename Scalar>
Scalar kink_margin(const BasicMlp<Scalar> &net, const typename BasicMlp<Scalar>::Vector &x) {
    const auto pre = forward_trace(net, typename BasicMlp<Scalar>::Matrix(x));
    Scalar margin = std::numeric_limits<Scalar>::infinity();
    for (std::size_t l = 0; l + 1 < pre.size(); ++l) margin = std::min(margin, pre[l].cwiseAbs().minCoeff());
    return margin;
}

/// Copy of `target` carrying the parameters of `source`.
template <typename Scalar>
BasicMlp<Scalar> transfer_weights(const BasicMlp<Scalar> &source, const BasicMlp<Scalar> &target) {
    if (source.sizes() != target.sizes()) throw ArchitectureMismatchError("layer sizes differ");
    BasicMlp<Scalar> out = target;
    out.set_parameters(source.parameters());
    return out;
}

inline constexpr char mlp_magic[4] = {'T', 'M', 'L', 'P'};
inline constexpr std::uint32_t mlp_format_version = 1;

/// Flat little-endian layout: magic "TMLP", u32 version, u32 layer-size count, u32 sizes, then per
/// layer the row-major weights followed by the biases as f64.
void save_mlp(std::ostream &out, const Mlp &net);
Mlp load_mlp(std::istream &in);

} // namespace ttms
