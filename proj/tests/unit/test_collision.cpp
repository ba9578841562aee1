#include <doctest.h>

#include <cmath>
#include <random>

#include "ropecloth/collision.hpp"

using namespace ropecloth;

namespace {

MotionSample static_sample() {
    BodyMotion still;
    return MotionSample::from(still, 0.0, 1.0 / 60.0);
}

}  // namespace

TEST_CASE("resolve_particle: head-on hit lands exactly on the surface") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    CollisionPolicy policy;
    policy.epsilon = 0.0;
    for (auto mode : {PushoutDirection::History, PushoutDirection::Gradient}) {
        policy.pushout = mode;
        const auto r = resolve_particle({1.5, 0, 0}, {0.5, 0, 0}, {-1, 0, 0}, sdf,
                                        static_sample(), policy);
        CHECK(r.collided);
        CHECK(r.position.x == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.position.y == 0.0);
    }
}

TEST_CASE("resolve_particle: outside the shell is untouched") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    CollisionPolicy policy;
    policy.epsilon = 1e-3;
    const Vec3 x{1.2, 0.3, 0};
    const Vec3 v{-0.4, 0.1, 0.2};
    const auto r = resolve_particle({1.4, 0.3, 0}, x, v, sdf, static_sample(), policy);
    CHECK_FALSE(r.collided);
    CHECK((r.position - x).norm() == 0.0);
    CHECK((r.velocity - v).norm() == 0.0);
}

TEST_CASE("resolve_particle: random hits end outside with non-approaching velocity") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    std::mt19937_64 rng(13);
    auto rnd = [&](double lo, double hi) { return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53); };
    for (int it = 0; it < 300; ++it) {
        Vec3 dir{rnd(-1, 1), rnd(-1, 1), rnd(-1, 1)};
        if (dir.norm() < 1e-3) continue;
        dir = dir / dir.norm();
        const Vec3 x_prev = dir * rnd(1.1, 1.6);
        const Vec3 x_new = dir * rnd(0.2, 0.99) + Vec3{rnd(-0.2, 0.2), rnd(-0.2, 0.2), 0};
        const Vec3 v{rnd(-2, 2), rnd(-2, 2), rnd(-2, 2)};

        CollisionPolicy policy;
        policy.pushout_iterations = 30;  // deep hits with oblique reverse paths
        const auto r = resolve_particle(x_prev, x_new, v, sdf, static_sample(), policy);
        if (!r.collided) continue;
        CHECK(sdf.phi(r.position) >= -1e-9);
        // Relative normal velocity against the policy's own normal.
        const Vec3 n_hist = (x_prev - x_new) / (x_prev - x_new).norm();
        CHECK(r.velocity.dot(n_hist) >= v.dot(n_hist) - 1e-12);
        CHECK(r.velocity.dot(n_hist) >= -1e-12);

        // A single history push may not reach the surface but never digs deeper.
        CollisionPolicy one = policy;
        one.pushout_iterations = 1;
        const auto r1 = resolve_particle(x_prev, x_new, v, sdf, static_sample(), one);
        CHECK(sdf.phi(r1.position) >= -std::abs(sdf.phi(x_new)) - 1e-12);
    }
}

TEST_CASE("resolve_particle: friction clamps but never reverses sliding") {
    AnalyticSdf sdf({SphereSdf{{0, -1.0, 0}, 1.0}});  // surface near the origin
    CollisionPolicy policy;
    policy.pushout = PushoutDirection::Gradient;
    policy.normal = ProjectionNormal::Gradient;
    policy.epsilon = 0.0;
    const Vec3 x_prev{0, 0.05, 0};
    const Vec3 x_new{0, -0.01, 0};
    const Vec3 v{1.0, -0.6, 0};  // sliding +x, approaching

    policy.friction = 0.0;
    const auto r0 = resolve_particle(x_prev, x_new, v, sdf, static_sample(), policy);
    CHECK(r0.velocity.x == doctest::Approx(1.0).epsilon(1e-12));  // tangential untouched
    CHECK(r0.velocity.y == doctest::Approx(0.0).epsilon(1e-12));  // normal clamped

    policy.friction = 0.3;
    const auto r1 = resolve_particle(x_prev, x_new, v, sdf, static_sample(), policy);
    const double expected = 1.0 - 0.3 * 0.6;  // 1 - mu * dv_n
    CHECK(r1.velocity.x == doctest::Approx(expected).epsilon(1e-9));
    CHECK(r1.velocity.x > 0.0);

    policy.friction = 1e9;  // effectively infinite: tangential driven to zero, not reversed
    const auto r2 = resolve_particle(x_prev, x_new, v, sdf, static_sample(), policy);
    CHECK(r2.velocity.x == doctest::Approx(0.0));
    CHECK(r2.velocity.x >= 0.0);
}

TEST_CASE("resolve_particle: interpenetrating embedded prior flags a gradient fallback") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    CollisionPolicy policy;
    policy.pushout = PushoutDirection::History;
    // Prior position already inside the body.
    const auto r = resolve_particle({0.5, 0, 0}, {0.3, 0, 0}, {-1, 0, 0}, sdf,
                                    static_sample(), policy);
    CHECK(r.collided);
    CHECK(r.gradient_fallback);
    CHECK(sdf.phi(r.position) >= -1e-9);
}

TEST_CASE("resolve_particle: bisection ends on the epsilon shell for static bodies") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    CollisionPolicy policy;
    policy.pushout = PushoutDirection::Bisection;
    policy.epsilon = 0.01;
    const auto r = resolve_particle({2.0, 0.3, 0}, {0.2, 0.1, 0}, {-2, 0, 0}, sdf,
                                    static_sample(), policy);
    CHECK(r.collided);
    CHECK(sdf.phi(r.position) == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("resolve_particle: moving body, velocity projection picks up body speed") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 0.5}});
    BodyMotion motion({{0.0, {-1.0, 0, 0}, {}}, {1.0, {1.0, 0, 0}, {}}});
    const auto sample = MotionSample::from(motion, 0.45, 0.5);  // body center near origin
    CollisionPolicy policy;
    // Particle sitting just inside the leading surface of the moving sphere.
    const auto r = resolve_particle({0.45, 0.0, 0.0}, {0.35, 0.0, 0.0}, {}, sdf, sample, policy);
    CHECK(r.collided);
    // Body moves +x at 2 m/s; the particle must not keep approaching it.
    CHECK(r.velocity.x == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("collide_chain: no bodies is the identity") {
    RopeChain chain({{{0, 0, 0}, {}, 0.0}, {{0, -0.5, 0}, {0.1, 0, 0}, 0.1}}, {0.5});
    const Vec3 before = chain.bone(1).position;
    std::vector<Vec3> prev{{0, 0, 0}, {0, -0.5, 0}};
    const auto report = collide_chain(chain, prev, {}, {}, CollisionPolicy{});
    CHECK(report.collided_bones == 0);
    CHECK((chain.bone(1).position - before).norm() == 0.0);
}

TEST_CASE("collide_chain: length first, collision wins") {
    // Bone is overlong AND would collide after the length fix; final state
    // must be non-interpenetrating even if length suffers.
    AnalyticSdf sdf({SphereSdf{{0, -0.5, 0}, 0.45}});
    std::vector<AnalyticSdf> bodies{sdf};
    std::vector<MotionSample> motions{static_sample()};
    RopeChain chain({{{0, 0.2, 0}, {}, 0.0}, {{0, -0.9, 0}, {0, -0.1, 0}, 0.1}}, {0.5});
    std::vector<Vec3> prev{{0, 0.2, 0}, {0, 0.25, 0}};
    CollisionPolicy policy;
    policy.pushout_iterations = 4;
    policy.epsilon = 1e-4;
    const auto report = collide_chain(chain, prev, bodies, motions, policy);
    CHECK(report.collided_bones == 1);
    CHECK(sdf.phi(chain.bone(1).position) >= -1e-9);
}

TEST_CASE("collide_chain: chain draped over a sphere ends non-interpenetrating") {
    AnalyticSdf sdf({SphereSdf{{0, -0.3, 0}, 0.25}});
    std::vector<AnalyticSdf> bodies{sdf};
    std::vector<MotionSample> motions{static_sample()};
    std::vector<VirtualBone> bones;
    bones.push_back({{-0.3, 0, 0}, {}, 0.0});
    std::vector<Vec3> prev{{-0.3, 0, 0}};
    std::vector<double> lens;
    for (int i = 1; i <= 6; ++i) {
        const Vec3 p{-0.3 + 0.12 * i, -0.12 * i, 0};
        bones.push_back({p, {0, -0.5, 0}, 0.05});
        prev.push_back(p + Vec3{0, 0.3, 0});
        lens.push_back(0.17);
    }
    RopeChain chain(std::move(bones), std::move(lens));
    CollisionPolicy policy;
    policy.pushout_iterations = 4;
    const auto report = collide_chain(chain, prev, bodies, motions, policy);
    for (std::size_t i = 1; i < chain.bone_count(); ++i)
        CHECK(sdf.phi(chain.bone(i).position) >= -1e-9);
    CHECK(report.min_phi_after >= -1e-9);
}
