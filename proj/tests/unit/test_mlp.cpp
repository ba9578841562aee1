#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ropecloth/mlp.hpp"

using namespace ropecloth;

namespace {

double rnd(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

// Random net and input resampled until every pre-activation is at least
// margin away from the ReLU kink, so central differences stay valid.
struct FdCase {
    Mlp2 net;
    std::vector<double> x;
};

FdCase make_fd_case(std::uint64_t seed, double margin = 1e-3) {
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 200; ++attempt) {
        Mlp2 net = Mlp2::init(5, 7, 3, rng());
        for (double* block : net.parameter_blocks()) (void)block;
        std::vector<double> x(5);
        for (double& v : x) v = rnd(rng, -1.5, 1.5);
        MlpWorkspace ws;
        net.forward(x, ws);
        bool ok = true;
        for (double z : ws.z1) ok = ok && std::abs(z) > margin;
        for (double z : ws.z2) ok = ok && std::abs(z) > margin;
        if (ok) return {std::move(net), std::move(x)};
    }
    FAIL("could not sample a kink-free configuration");
    return {};
}

double loss_of(const Mlp2& net, std::span<const double> x,
               std::span<const double> target) {
    MlpWorkspace ws;
    net.forward(x, ws);
    double loss = 0.0;
    for (std::size_t i = 0; i < ws.y.size(); ++i)
        loss += (ws.y[i] - target[i]) * (ws.y[i] - target[i]);
    return loss;
}

}  // namespace

TEST_CASE("mlp: zero weights output the output bias") {
    Mlp2 net = Mlp2::init(4, 6, 2, 11);
    std::fill(net.w1.begin(), net.w1.end(), 0.0);
    std::fill(net.w2.begin(), net.w2.end(), 0.0);
    std::fill(net.w3.begin(), net.w3.end(), 0.0);
    net.b3 = {0.7, -0.3};
    MlpWorkspace ws;
    net.forward(std::vector<double>{1, 2, 3, 4}, ws);
    CHECK(ws.y[0] == 0.7);
    CHECK(ws.y[1] == -0.3);
}

TEST_CASE("mlp: backprop matches central finite differences") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        FdCase c = make_fd_case(seed);
        std::vector<double> target{0.3, -0.8, 1.1};

        MlpWorkspace ws;
        c.net.forward(c.x, ws);
        std::vector<double> dy(3);
        for (std::size_t i = 0; i < 3; ++i) dy[i] = 2.0 * (ws.y[i] - target[i]);
        MlpGrads grads = c.net.make_grads();
        c.net.backward(c.x, ws, dy, grads);

        const double h = 1e-5;
        auto blocks = c.net.parameter_blocks();
        std::vector<double*> grad_blocks{grads.w1.data(), grads.b1.data(), grads.w2.data(),
                                         grads.b2.data(), grads.w3.data(), grads.b3.data()};
        const auto sizes = c.net.block_sizes();
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (std::size_t i = 0; i < sizes[b]; ++i) {
                const double saved = blocks[b][i];
                blocks[b][i] = saved + h;
                const double up = loss_of(c.net, c.x, target);
                blocks[b][i] = saved - h;
                const double dn = loss_of(c.net, c.x, target);
                blocks[b][i] = saved;
                const double fd = (up - dn) / (2.0 * h);
                const double an = grad_blocks[b][i];
                const double scale = std::max({std::abs(fd), std::abs(an), 1e-6});
                CHECK(std::abs(fd - an) / scale < 1e-4);
            }
        }
    }
}

TEST_CASE("mlp: gradients are linear in the loss gradient") {
    FdCase c = make_fd_case(77);
    MlpWorkspace ws;
    c.net.forward(c.x, ws);
    std::vector<double> dy{0.4, -0.2, 0.9};
    MlpGrads g1 = c.net.make_grads();
    c.net.backward(c.x, ws, dy, g1);
    for (double& v : dy) v *= 2.0;
    MlpGrads g2 = c.net.make_grads();
    c.net.backward(c.x, ws, dy, g2);
    for (std::size_t i = 0; i < g1.w1.size(); ++i)
        CHECK(g2.w1[i] == doctest::Approx(2.0 * g1.w1[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < g1.b3.size(); ++i)
        CHECK(g2.b3[i] == doctest::Approx(2.0 * g1.b3[i]).epsilon(1e-12));
}

TEST_CASE("mlp: init is deterministic, cosine schedule hits endpoints") {
    const Mlp2 a = Mlp2::init(6, 9, 4, 42);
    const Mlp2 b = Mlp2::init(6, 9, 4, 42);
    CHECK(a.w1 == b.w1);
    CHECK(a.w3 == b.w3);
    CHECK(cosine_annealed_lr(1e-4, 0, 100) == doctest::Approx(1e-4));
    CHECK(cosine_annealed_lr(1e-4, 99, 100) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cosine_annealed_lr(1e-4, 50, 101) == doctest::Approx(5e-5));
}

TEST_CASE("adam: pulls a scalar toward its minimum deterministically") {
    std::vector<double> p{3.0};
    AdamOptimizer opt(1, 0.9, 0.999, 1e-8);
    for (int i = 0; i < 4000; ++i) {
        std::vector<double> g{2.0 * p[0]};  // d/dp of p^2
        opt.step(p, g, 1e-2);
    }
    CHECK(std::abs(p[0]) < 1e-4);
}
