#include "ropecloth/rope_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace ropecloth {

namespace {

// Below this the relative residual test is considered stalled at machine
// precision (natural SI units: m/s for impulses, N for tensions).
constexpr double kStallFloor = 1e-13;

struct ChainGeometry {
    std::vector<Vec3> dir;     // l_hat per segment (index 0 -> segment 1)
    std::vector<double> len;
    std::vector<double> centripetal;  // only filled for taut segments

    void gather(const RopeChain& chain, const SolverPolicy& policy,
                std::vector<bool>& taut, bool with_centripetal) {
        const std::size_t m = chain.segment_count();
        dir.resize(m);
        len.resize(m);
        centripetal.assign(m, 0.0);
        taut.assign(m, false);
        for (std::size_t i = 1; i <= m; ++i) {
            auto [d, l] = chain.segment_dir_len(i);
            dir[i - 1] = d;
            len[i - 1] = l;
            taut[i - 1] = l >= chain.max_length(i) * policy.taut_threshold;
            if (taut[i - 1] && with_centripetal)
                centripetal[i - 1] = centripetal_magnitude(chain, i);
        }
    }
};

}  // namespace

double centripetal_magnitude(const RopeChain& chain, std::size_t segment) {
    const VirtualBone& a = chain.bone(segment - 1);
    const VirtualBone& b = chain.bone(segment);
    const Vec3 l_hat = chain.segment_dir_len(segment).first;

    Vec3 center_x;
    Vec3 center_v;
    if (segment == 1) {
        // The root's mass is infinite, so the pivot is the root itself; the
        // second line of the centripetal formula avoids the 0/0 of the first.
        center_x = a.position;
        center_v = a.velocity;
    } else {
        const double total = a.mass + b.mass;
        center_x = (a.position * a.mass + b.position * b.mass) / total;
        center_v = (a.velocity * a.mass + b.velocity * b.mass) / total;
    }

    const double radius = (b.position - center_x).norm();
    if (radius < 1e-12) return 0.0;
    const Vec3 v_rel = b.velocity - center_v;
    const Vec3 v_tan = v_rel - l_hat * v_rel.dot(l_hat);
    return b.mass * v_tan.norm2() / radius;
}

namespace {

// Gauss-Seidel right-hand side for tension row i (1-based segment index).
// Assumes slack segments hold T = 0 so their terms vanish naturally.
double tension_rhs(const RopeChain& chain, const ChainGeometry& g,
                   std::span<const Vec3> f_ext, const Vec3& root_accel,
                   const std::vector<double>& t, std::size_t i) {
    const std::size_t m = chain.segment_count();
    const Vec3& li = g.dir[i - 1];
    if (i == 1) {
        double rhs = f_ext[1].dot(li) + g.centripetal[0] -
                     chain.bone(1).mass * root_accel.dot(li);
        if (m >= 2) rhs += g.dir[1].dot(li) * t[1];
        return rhs;
    }
    double rhs = (f_ext[i] - f_ext[i - 1]).dot(li) + 2.0 * g.centripetal[i - 1] +
                 g.dir[i - 2].dot(li) * t[i - 2];
    if (i < m) rhs += g.dir[i].dot(li) * t[i];
    return 0.5 * rhs;
}

double impulse_effective_mass(const RopeChain& chain, std::size_t i) {
    if (i == 1) return chain.bone(1).mass;
    const double ma = chain.bone(i - 1).mass;
    const double mb = chain.bone(i).mass;
    return ma * mb / (ma + mb);
}

double impulse_rhs(const RopeChain& chain, const ChainGeometry& g,
                   const std::vector<double>& imp, std::size_t i) {
    const std::size_t m = chain.segment_count();
    const Vec3& li = g.dir[i - 1];
    const Vec3 dv = chain.bone(i).velocity - chain.bone(i - 1).velocity;
    double inner = dv.dot(li);
    if (i >= 2) inner += g.dir[i - 2].dot(li) / chain.bone(i - 1).mass * imp[i - 2];
    if (i < m) inner += g.dir[i].dot(li) / chain.bone(i).mass * imp[i];
    return impulse_effective_mass(chain, i) * inner;
}

// Projected fixed-point residual max_i |x_i - max(0, rhs_i)| over taut rows,
// optionally scaled per-row (velocity units for impulses).
template <typename RhsFn, typename ScaleFn>
double fixed_point_residual(const std::vector<bool>& taut, const std::vector<double>& x,
                            RhsFn rhs, ScaleFn scale) {
    double r = 0.0;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        if (!taut[i - 1]) continue;
        const double target = std::max(0.0, rhs(i));
        r = std::max(r, std::abs(x[i - 1] - target) * scale(i));
    }
    return r;
}

}  // namespace

void solve_tensions(const RopeChain& chain, std::span<const Vec3> f_ext,
                    const Vec3& root_accel, const SolverPolicy& policy,
                    SolveScratch& scratch) {
    const std::size_t m = chain.segment_count();
    assert(f_ext.size() == chain.bone_count());
    if (scratch.tensions.size() != m) scratch.resize(m);

    ChainGeometry g;
    g.gather(chain, policy, scratch.taut, /*with_centripetal=*/true);

    if (!policy.warm_start) std::fill(scratch.tensions.begin(), scratch.tensions.end(), 0.0);
    for (std::size_t i = 1; i <= m; ++i)
        if (!scratch.taut[i - 1]) scratch.tensions[i - 1] = 0.0;

    auto rhs = [&](std::size_t i) {
        return tension_rhs(chain, g, f_ext, root_accel, scratch.tensions, i);
    };
    auto sweep = [&] {
        // Tip-to-root so one sweep already stacks the weight of everything below.
        for (std::size_t i = m; i >= 1; --i) {
            if (!scratch.taut[i - 1]) continue;
            scratch.tensions[i - 1] = std::max(0.0, rhs(i));
        }
    };
    auto residual = [&] {
        return fixed_point_residual(scratch.taut, scratch.tensions, rhs,
                                    [](std::size_t) { return 1.0; });
    };

    scratch.converged = true;
    if (policy.mode == SolverPolicy::Mode::FixedSweeps) {
        for (int s = 0; s < policy.sweeps; ++s) sweep();
        scratch.sweeps_used = policy.sweeps;
        return;
    }

    const double r0 = residual();
    const double target = std::max(policy.epsilon * r0, kStallFloor);
    scratch.sweeps_used = 0;
    if (r0 <= target) return;
    while (scratch.sweeps_used < policy.max_sweeps) {
        sweep();
        ++scratch.sweeps_used;
        if (residual() <= target) return;
    }
    scratch.converged = false;
}

void net_forces(const RopeChain& chain, std::span<const Vec3> f_ext,
                const SolveScratch& scratch, std::vector<Vec3>& out) {
    const std::size_t m = chain.segment_count();
    out.assign(chain.bone_count(), Vec3{});
    for (std::size_t i = 1; i <= m; ++i) {
        const Vec3 li = chain.segment_dir_len(i).first;
        Vec3 f = f_ext[i] - li * scratch.tensions[i - 1];
        if (i < m) f += chain.segment_dir_len(i + 1).first * scratch.tensions[i];
        out[i] = f;
    }
}

void velocity_half_step(RopeChain& chain, std::span<const Vec3> f_net, double dt,
                        const Vec3& root_velocity) {
    assert(dt > 0.0);
    chain.bone(0).velocity = root_velocity;
    for (std::size_t i = 1; i < chain.bone_count(); ++i)
        chain.bone(i).velocity += f_net[i] * (0.5 * dt / chain.bone(i).mass);
}

void solve_impulses(RopeChain& chain, const SolverPolicy& policy, SolveScratch& scratch) {
    const std::size_t m = chain.segment_count();
    if (scratch.impulses.size() != m) scratch.resize(m);

    ChainGeometry g;
    g.gather(chain, policy, scratch.taut, /*with_centripetal=*/false);

    if (!policy.warm_start) std::fill(scratch.impulses.begin(), scratch.impulses.end(), 0.0);
    for (std::size_t i = 1; i <= m; ++i)
        if (!scratch.taut[i - 1]) scratch.impulses[i - 1] = 0.0;

    auto rhs = [&](std::size_t i) { return impulse_rhs(chain, g, scratch.impulses, i); };
    auto sweep = [&] {
        // Root to tip, the order that works well for contact resolution.
        for (std::size_t i = 1; i <= m; ++i) {
            if (!scratch.taut[i - 1]) continue;
            scratch.impulses[i - 1] = std::max(0.0, rhs(i));
        }
    };
    auto residual = [&] {
        return fixed_point_residual(scratch.taut, scratch.impulses, rhs, [&](std::size_t i) {
            return 1.0 / impulse_effective_mass(chain, i);
        });
    };

    scratch.converged = true;
    if (policy.mode == SolverPolicy::Mode::FixedSweeps) {
        for (int s = 0; s < policy.sweeps; ++s) sweep();
        scratch.sweeps_used = policy.sweeps;
    } else {
        const double r0 = residual();
        const double target =
            std::max(std::min(policy.epsilon * r0, policy.impulse_velocity_floor), kStallFloor);
        scratch.sweeps_used = 0;
        if (r0 > target) {
            scratch.converged = false;
            while (scratch.sweeps_used < policy.max_sweeps) {
                sweep();
                ++scratch.sweeps_used;
                if (residual() <= target) {
                    scratch.converged = true;
                    break;
                }
            }
        }
    }

    // Momentum exchange along the segment directions; the root is unaffected.
    for (std::size_t i = 1; i <= m; ++i) {
        Vec3 dp = g.dir[i - 1] * -scratch.impulses[i - 1];
        if (i < m) dp += g.dir[i] * scratch.impulses[i];
        chain.bone(i).velocity += dp / chain.bone(i).mass;
    }
}

double max_taut_separation_speed(const RopeChain& chain, const SolveScratch& scratch) {
    double worst = 0.0;
    for (std::size_t i = 1; i <= chain.segment_count(); ++i) {
        if (!scratch.taut[i - 1]) continue;
        const Vec3 l_hat = chain.segment_dir_len(i).first;
        const Vec3 dv = chain.bone(i).velocity - chain.bone(i - 1).velocity;
        worst = std::max(worst, dv.dot(l_hat));
    }
    return worst;
}

}  // namespace ropecloth
