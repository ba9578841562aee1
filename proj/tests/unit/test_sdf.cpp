#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ropecloth/sdf.hpp"

using namespace ropecloth;

namespace {

double rnd(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

}  // namespace

TEST_CASE("sphere: distance and gradient outside") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    CHECK(sdf.phi({2, 0, 0}) == doctest::Approx(1.0));
    const Vec3 g = sdf.grad_phi({2, 0, 0});
    CHECK(g.x == doctest::Approx(1.0));
    CHECK(g.y == doctest::Approx(0.0));
}

TEST_CASE("sphere: center singularity falls back to world up") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    CHECK(sdf.phi({0, 0, 0}) == doctest::Approx(-1.0));
    const Vec3 g = sdf.grad_phi({0, 0, 0});
    CHECK(g.y == doctest::Approx(1.0));
}

TEST_CASE("capsule: matches a dense surface point cloud") {
    const CapsuleSdf cap{{-0.4, 0, 0}, {0.4, 0.1, 0.05}, 0.3};
    AnalyticSdf sdf({cap});

    // Dense surface samples: tube as a theta x axial grid plus two cap domes.
    std::vector<Vec3> cloud;
    const Vec3 axis = cap.p1 - cap.p0;
    const Vec3 axis_hat = axis / axis.norm();
    Vec3 u = axis_hat.cross({0, 0, 1});
    if (u.norm() < 1e-6) u = axis_hat.cross({0, 1, 0});
    u = u / u.norm();
    const Vec3 w = axis_hat.cross(u);
    const int n_theta = 600, n_axial = 400, n_polar = 150;
    for (int i = 0; i < n_axial; ++i) {
        const Vec3 base = cap.p0 + axis * (static_cast<double>(i) / (n_axial - 1));
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2 * M_PI * j / n_theta;
            cloud.push_back(base + (u * std::cos(th) + w * std::sin(th)) * cap.radius);
        }
    }
    for (int end = 0; end < 2; ++end) {
        const Vec3 c = end ? cap.p1 : cap.p0;
        const Vec3 n = end ? axis_hat : -axis_hat;
        for (int i = 1; i <= n_polar; ++i) {
            const double ph = 0.5 * M_PI * i / n_polar;
            for (int j = 0; j < n_theta / 2; ++j) {
                const double th = 2 * M_PI * j / (n_theta / 2);
                cloud.push_back(c + (n * std::sin(ph) +
                                     (u * std::cos(th) + w * std::sin(th)) * std::cos(ph)) *
                                        cap.radius);
            }
        }
    }

    std::mt19937_64 rng(5);
    for (int it = 0; it < 10000; ++it) {
        const Vec3 x{rnd(rng, -1.2, 1.2), rnd(rng, -1.0, 1.0), rnd(rng, -1.0, 1.0)};
        double best = 1e300;
        for (const Vec3& s : cloud) best = std::min(best, (x - s).norm2());
        CHECK(std::abs(std::abs(sdf.phi(x)) - std::sqrt(best)) < 2e-3);
    }
}

TEST_CASE("capsule: gradient is unit length everywhere sampled") {
    AnalyticSdf sdf({CapsuleSdf{{0, -0.5, 0}, {0, 0.5, 0}, 0.2}});
    std::mt19937_64 rng(9);
    for (int it = 0; it < 500; ++it) {
        const Vec3 x{rnd(rng, -1, 1), rnd(rng, -1, 1), rnd(rng, -1, 1)};
        CHECK(sdf.grad_phi(x).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rounded box: exact on faces, edges and inside") {
    const RoundedBoxSdf box{{0, 0, 0}, {0, 1, 0}, 0.0, {0.5, 0.3, 0.2}, 0.05};
    AnalyticSdf sdf({box});
    // Outside a face.
    CHECK(sdf.phi({1.0, 0, 0}) == doctest::Approx(1.0 - 0.5 - 0.05));
    // Beyond a corner: distance to the corner point minus the rounding.
    const Vec3 corner{0.5, 0.3, 0.2};
    const Vec3 q{1.0, 0.8, 0.6};
    CHECK(sdf.phi(q) == doctest::Approx((q - corner).norm() - 0.05));
    // Dead center: deepest face is z (smallest half extent).
    CHECK(sdf.phi({0, 0, 0}) == doctest::Approx(-0.2 - 0.05));
    // Gradient outside the +x face.
    CHECK(sdf.grad_phi({1.0, 0, 0}).x == doctest::Approx(1.0));
}

TEST_CASE("rounded box: rotation moves the field rigidly") {
    const RoundedBoxSdf straight{{0, 0, 0}, {0, 0, 1}, 0.0, {0.4, 0.2, 0.3}, 0.02};
    const RoundedBoxSdf rotated{{0, 0, 0}, {0, 0, 1}, M_PI / 3, {0.4, 0.2, 0.3}, 0.02};
    std::mt19937_64 rng(31);
    for (int it = 0; it < 300; ++it) {
        const Vec3 x{rnd(rng, -1, 1), rnd(rng, -1, 1), rnd(rng, -1, 1)};
        const Vec3 x_rot = rotate_about_axis(x, {0, 0, 1}, M_PI / 3);
        CHECK(primitive_phi(rotated, x_rot) ==
              doctest::Approx(primitive_phi(straight, x)).epsilon(1e-12));
    }
}

TEST_CASE("min-union: ties break to the lowest primitive index") {
    AnalyticSdf sdf({SphereSdf{{-1, 0, 0}, 0.5}, SphereSdf{{1, 0, 0}, 0.5}});
    // Equidistant point: gradient must come from primitive 0.
    const Vec3 g = sdf.grad_phi({0, 0, 0});
    CHECK(g.x == doctest::Approx(1.0));  // outward from the left sphere
}

TEST_CASE("embed_point: stationary, translation, and isometry") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 0.5}});

    BodyMotion still;
    auto s0 = MotionSample::from(still, 0.0, 0.1);
    const Vec3 x{0.3, 0.8, -0.2};
    CHECK((s0.embed_point(x) - x).norm() == 0.0);

    BodyMotion slide({{0.0, {0, 0, 0}, {}}, {1.0, {2, 0, 0}, {}}});
    auto s1 = MotionSample::from(slide, 0.0, 0.5);
    CHECK((s1.embed_point(x) - (x + Vec3{1, 0, 0})).norm() < 1e-12);
    CHECK((s1.body_velocity(x) - Vec3{2, 0, 0}).norm() < 1e-12);

    BodyMotion spin({{0.0, {0, 0, 0}, {}}, {1.0, {0, 0, 0}, {0, 0, M_PI / 2}}});
    auto s2 = MotionSample::from(spin, 0.0, 1.0);
    const Vec3 moved = s2.embed_point(x);
    CHECK(s2.phi_end(sdf, moved) == doctest::Approx(sdf.phi(x)).epsilon(1e-12));
    const Vec3 expected = rotate_about_axis(x, {0, 0, 1}, M_PI / 2);
    CHECK((moved - expected).norm() < 1e-12);
}
