#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ropecloth {

/// Deterministic uniform double in [lo, hi) from a raw 64-bit stream; the
/// standard distributions are implementation-defined, this is not.
double uniform_from_bits(std::uint64_t bits, double lo, double hi);

struct MlpWorkspace {
    std::vector<double> z1, h1, z2, h2, y;
};

struct MlpGrads {
    std::vector<double> w1, b1, w2, b2, w3, b3;
    void zero();
};

/// Two ReLU hidden layers of equal width and a linear output; explicit
/// forward and backward passes, no autodiff.
struct Mlp2 {
    std::size_t in = 0;
    std::size_t hidden = 0;
    std::size_t out = 0;
    // Row-major weights: w[row * cols + col], rows = layer outputs.
    std::vector<double> w1, b1, w2, b2, w3, b3;

    /// Uniform init scaled by 1/sqrt(fan_in), biases zero, fixed seed.
    static Mlp2 init(std::size_t in, std::size_t hidden, std::size_t out,
                     std::uint64_t seed);

    void forward(std::span<const double> x, MlpWorkspace& ws) const;

    /// Backprop of dL/dy through the workspace of the matching forward call;
    /// accumulates into grads and optionally reports dL/dx.
    void backward(std::span<const double> x, const MlpWorkspace& ws,
                  std::span<const double> dy, MlpGrads& grads,
                  std::span<double> dx = {}) const;

    MlpGrads make_grads() const;
    std::size_t parameter_count() const;

    /// Flattened parameter access in a fixed order (w1,b1,w2,b2,w3,b3), used
    /// by the optimizer and the finite-difference tests.
    std::vector<double*> parameter_blocks();
    std::vector<const double*> parameter_blocks() const;
    std::vector<std::size_t> block_sizes() const;
};

/// Standard Adam with bias correction.
class AdamOptimizer {
  public:
    AdamOptimizer(std::size_t parameter_count, double beta1, double beta2, double eps);
    void step(std::span<double> params, std::span<const double> grads, double lr);

  private:
    std::vector<double> m_, v_;
    double beta1_, beta2_, eps_;
    long t_ = 0;
};

/// lr on a cosine schedule from lr0 down to lr_min across total epochs.
double cosine_annealed_lr(double lr0, int epoch, int total_epochs, double lr_min = 0.0);

}  // namespace ropecloth
