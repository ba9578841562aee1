#include "ropecloth/mlp.hpp"

#include <cassert>
#include <cmath>
#include <random>

namespace ropecloth {

double uniform_from_bits(std::uint64_t bits, double lo, double hi) {
    const double u = (bits >> 11) * 0x1.0p-53;  // [0, 1)
    return lo + (hi - lo) * u;
}

void MlpGrads::zero() {
    auto clear = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
    clear(w1); clear(b1); clear(w2); clear(b2); clear(w3); clear(b3);
}

Mlp2 Mlp2::init(std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed) {
    Mlp2 net;
    net.in = in;
    net.hidden = hidden;
    net.out = out;
    std::mt19937_64 rng(seed);
    auto fill = [&](std::vector<double>& w, std::size_t rows, std::size_t cols) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        w.resize(rows * cols);
        for (double& v : w) v = uniform_from_bits(rng(), -bound, bound);
    };
    fill(net.w1, hidden, in);
    net.b1.assign(hidden, 0.0);
    fill(net.w2, hidden, hidden);
    net.b2.assign(hidden, 0.0);
    fill(net.w3, out, hidden);
    net.b3.assign(out, 0.0);
    return net;
}

namespace {

void affine(std::span<const double> w, std::span<const double> b,
            std::span<const double> x, std::vector<double>& z) {
    const std::size_t rows = b.size();
    const std::size_t cols = x.size();
    z.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w.data() + r * cols;
        double s = b[r];
        for (std::size_t c = 0; c < cols; ++c) s += wr[c] * x[c];
        z[r] = s;
    }
}

void relu(const std::vector<double>& z, std::vector<double>& h) {
    h.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) h[i] = z[i] > 0.0 ? z[i] : 0.0;
}

}  // namespace

void Mlp2::forward(std::span<const double> x, MlpWorkspace& ws) const {
    assert(x.size() == in);
    affine(w1, b1, x, ws.z1);
    relu(ws.z1, ws.h1);
    affine(w2, b2, ws.h1, ws.z2);
    relu(ws.z2, ws.h2);
    affine(w3, b3, ws.h2, ws.y);
}

void Mlp2::backward(std::span<const double> x, const MlpWorkspace& ws,
                    std::span<const double> dy, MlpGrads& grads,
                    std::span<double> dx) const {
    assert(dy.size() == out);
    static thread_local std::vector<double> dh2, dz2, dh1, dz1;

    // Output layer: y = w3 h2 + b3.
    dh2.assign(hidden, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
        const double g = dy[r];
        grads.b3[r] += g;
        double* wr = grads.w3.data() + r * hidden;
        const double* w = w3.data() + r * hidden;
        for (std::size_t c = 0; c < hidden; ++c) {
            wr[c] += g * ws.h2[c];
            dh2[c] += g * w[c];
        }
    }
    dz2.resize(hidden);
    for (std::size_t i = 0; i < hidden; ++i) dz2[i] = ws.z2[i] > 0.0 ? dh2[i] : 0.0;

    dh1.assign(hidden, 0.0);
    for (std::size_t r = 0; r < hidden; ++r) {
        const double g = dz2[r];
        if (g == 0.0) continue;
        grads.b2[r] += g;
        double* wr = grads.w2.data() + r * hidden;
        const double* w = w2.data() + r * hidden;
        for (std::size_t c = 0; c < hidden; ++c) {
            wr[c] += g * ws.h1[c];
            dh1[c] += g * w[c];
        }
    }
    dz1.resize(hidden);
    for (std::size_t i = 0; i < hidden; ++i) dz1[i] = ws.z1[i] > 0.0 ? dh1[i] : 0.0;

    if (!dx.empty()) std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t r = 0; r < hidden; ++r) {
        const double g = dz1[r];
        if (g == 0.0) continue;
        grads.b1[r] += g;
        double* wr = grads.w1.data() + r * in;
        const double* w = w1.data() + r * in;
        for (std::size_t c = 0; c < in; ++c) {
            wr[c] += g * x[c];
            if (!dx.empty()) dx[c] += g * w[c];
        }
    }
}

MlpGrads Mlp2::make_grads() const {
    MlpGrads g;
    g.w1.assign(w1.size(), 0.0);
    g.b1.assign(b1.size(), 0.0);
    g.w2.assign(w2.size(), 0.0);
    g.b2.assign(b2.size(), 0.0);
    g.w3.assign(w3.size(), 0.0);
    g.b3.assign(b3.size(), 0.0);
    return g;
}

std::size_t Mlp2::parameter_count() const {
    return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

std::vector<double*> Mlp2::parameter_blocks() {
    return {w1.data(), b1.data(), w2.data(), b2.data(), w3.data(), b3.data()};
}

std::vector<const double*> Mlp2::parameter_blocks() const {
    return {w1.data(), b1.data(), w2.data(), b2.data(), w3.data(), b3.data()};
}

std::vector<std::size_t> Mlp2::block_sizes() const {
    return {w1.size(), b1.size(), w2.size(), b2.size(), w3.size(), b3.size()};
}

AdamOptimizer::AdamOptimizer(std::size_t parameter_count, double beta1, double beta2,
                             double eps)
    : m_(parameter_count, 0.0), v_(parameter_count, 0.0),
      beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grads, double lr) {
    assert(params.size() == m_.size() && grads.size() == m_.size());
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
    }
}

double cosine_annealed_lr(double lr0, int epoch, int total_epochs, double lr_min) {
    if (total_epochs <= 1) return lr0;
    const double phase = M_PI * static_cast<double>(epoch) / (total_epochs - 1);
    return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(phase));
}

}  // namespace ropecloth
