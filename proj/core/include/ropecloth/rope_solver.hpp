#pragma once

#include <span>
#include <vector>

#include "ropecloth/rope_chain.hpp"

namespace ropecloth {

struct SolverPolicy {
    enum class Mode { FixedSweeps, Tolerance };

    Mode mode = Mode::FixedSweeps;
    int sweeps = 1;              // FixedSweeps: exact sweep count
    double epsilon = 1e-6;       // Tolerance: relative residual target
    int max_sweeps = 1000;       // Tolerance: hard cap
    // A segment is taut when l >= l_max * taut_threshold. Strict equality
    // never fires in floating point, and the band must sit above the O(dt^3)
    // radius wobble a taut rotating rope carries between position sweeps
    // (~1e-7 relative at dt = 1/600 already) or the classification flaps.
    double taut_threshold = 1.0 - 1e-5;
    bool warm_start = false;
    // Tolerance-mode impulse solves additionally polish until the projected
    // fixed-point residual (velocity units) drops below this, so converged
    // solves leave taut relative normal velocities at ~0 regardless of how
    // large the incoming violation was.
    double impulse_velocity_floor = 1e-9;  // m/s

    static SolverPolicy fixed(int sweep_count) {
        SolverPolicy p;
        p.mode = Mode::FixedSweeps;
        p.sweeps = sweep_count;
        return p;
    }
    static SolverPolicy tolerance(double eps) {
        SolverPolicy p;
        p.mode = Mode::Tolerance;
        p.epsilon = eps;
        return p;
    }
};

/// Per-chain solve workspace and result. Entry i-1 belongs to segment i.
/// Slack segments always carry exactly zero tension/impulse.
struct SolveScratch {
    std::vector<double> tensions;   // N, >= 0
    std::vector<double> impulses;   // N*s, >= 0
    std::vector<bool> taut;
    int sweeps_used = 0;
    bool converged = true;  // false only if tolerance mode hit max_sweeps

    void resize(std::size_t segments) {
        tensions.assign(segments, 0.0);
        impulses.assign(segments, 0.0);
        taut.assign(segments, false);
    }
};

/// Magnitude of the centripetal force keeping bones i-1 and i rotating about
/// their common center of mass while segment i is taut. Segment 1 pivots
/// about the kinematic root itself (infinite root mass).
double centripetal_magnitude(const RopeChain& chain, std::size_t segment);

/// Tip-to-root Gauss-Seidel for the nonnegative tensions that preserve the
/// rotational motion of every taut segment. f_ext is indexed by bone
/// (entry 0 unused); root_accel is the kinematic root's acceleration.
/// Tensions start from zero (or the scratch's prior values when
/// policy.warm_start) and each update clamps at max(0, rhs).
void solve_tensions(const RopeChain& chain, std::span<const Vec3> f_ext,
                    const Vec3& root_accel, const SolverPolicy& policy,
                    SolveScratch& scratch);

/// F_net,i = F_ext,i - T_i l_hat_i + T_{i+1} l_hat_{i+1} (last bone omits the
/// second term). out is indexed by bone; out[0] is zeroed (root ignores forces).
void net_forces(const RopeChain& chain, std::span<const Vec3> f_ext,
                const SolveScratch& scratch, std::vector<Vec3>& out);

/// v += (dt/2) * F_net / M for non-kinematic bones; the root velocity is set
/// to root_velocity (from the driver).
void velocity_half_step(RopeChain& chain, std::span<const Vec3> f_net, double dt,
                        const Vec3& root_velocity);

/// Root-to-tip Gauss-Seidel for the nonnegative impulses that stop taut
/// segments from stretching, then applies the momentum exchange to the bone
/// velocities. The root velocity is never modified.
void solve_impulses(RopeChain& chain, const SolverPolicy& policy, SolveScratch& scratch);

/// Largest post-solve violation of (v_i - v_{i-1}) . l_hat_i <= 0 over taut
/// segments (m/s); 0 when nothing is taut. Uses current velocities.
double max_taut_separation_speed(const RopeChain& chain, const SolveScratch& scratch);

}  // namespace ropecloth
