#include "ropecloth/collision.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace ropecloth {

namespace {

bool is_static_sample(const MotionSample& m) {
    for (int c = 0; c < 3; ++c)
        if ((m.begin.rotation.col[c] - m.end.rotation.col[c]).norm2() != 0.0) return false;
    return (m.begin.translation - m.end.translation).norm2() == 0.0;
}

// Largest s in [0,1] with phi(lerp(a,b,s)) >= eps given phi(a) >= eps > phi(b),
// by bisection on the crossing (stationary body).
Vec3 bisect_to_shell(const AnalyticSdf& sdf, const MotionSample& motion, const Vec3& a,
                     const Vec3& b, double eps) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec3 x = a + (b - a) * mid;
        if (motion.phi_end(sdf, x) >= eps) lo = mid;
        else hi = mid;
    }
    return a + (b - a) * lo;
}

}  // namespace

ResolveResult resolve_particle(const Vec3& x_prev, const Vec3& x_new, const Vec3& v,
                               const AnalyticSdf& sdf, const MotionSample& motion,
                               const CollisionPolicy& policy) {
    ResolveResult out{x_new, v, false, false};
    if (sdf.empty()) return out;

    const double phi0 = motion.phi_end(sdf, x_new);
    if (phi0 >= policy.epsilon) return out;
    out.collided = true;

    // Transport the prior position with the body; rigid motion preserves its
    // signed distance, so it stays non-interpenetrating whenever x_prev was.
    const Vec3 embedded_prev = motion.embed_point(x_prev);
    const bool prev_inside = motion.phi_end(sdf, embedded_prev) < 0.0;
    if (prev_inside) out.gradient_fallback = true;

    PushoutDirection mode = policy.pushout;
    if (mode == PushoutDirection::Bisection) {
        if (!is_static_sample(motion)) {
            mode = PushoutDirection::History;  // bisection assumes a fixed body
            out.gradient_fallback = true;
        } else if (motion.phi_end(sdf, x_prev) >= policy.epsilon) {
            out.position = bisect_to_shell(sdf, motion, x_prev, x_new, policy.epsilon);
        } else {
            mode = PushoutDirection::History;
        }
    }

    if (mode != PushoutDirection::Bisection) {
        Vec3 dir;
        const Vec3 reverse_path = embedded_prev - x_new;
        if (mode == PushoutDirection::History && !prev_inside && reverse_path.norm2() > 1e-24) {
            dir = reverse_path / reverse_path.norm();
        } else {
            dir = motion.grad_end(sdf, out.position);
        }

        // Push only while actually inside; a particle merely within the
        // epsilon shell keeps its position and just gets the velocity
        // treatment. Along grad phi one push lands exactly on phi = +epsilon;
        // other directions under-shoot, hence the iteration budget.
        for (int it = 0; it < policy.pushout_iterations; ++it) {
            const double phi = motion.phi_end(sdf, out.position);
            if (phi >= 0.0) break;
            out.position += dir * (std::abs(phi) + policy.epsilon);
            if (mode == PushoutDirection::Gradient)
                dir = motion.grad_end(sdf, out.position);
        }
    }

    // Clamp the relative normal velocity to non-approaching.
    Vec3 normal;
    if (policy.normal == ProjectionNormal::History && !prev_inside &&
        (embedded_prev - x_new).norm2() > 1e-24) {
        normal = normalized_or(embedded_prev - x_new, motion.grad_end(sdf, out.position));
    } else {
        normal = motion.grad_end(sdf, out.position);
    }
    const Vec3 v_body = motion.body_velocity(out.position);
    const double vn_old = v.dot(normal);
    const double vn_new = std::max(vn_old, v_body.dot(normal));

    const Vec3 v_tan = v - normal * vn_old;
    const Vec3 v_body_tan = v_body - normal * v_body.dot(normal);
    const Vec3 v_rel_tan = v_tan - v_body_tan;
    Vec3 v_tan_new = v_tan;
    if (policy.friction > 0.0) {
        const double rel = v_rel_tan.norm();
        if (rel > 1e-15) {
            const double factor =
                std::max(0.0, 1.0 - policy.friction * (vn_new - vn_old) / rel);
            v_tan_new = v_body_tan + v_rel_tan * factor;
        } else {
            v_tan_new = v_body_tan;
        }
    }
    out.velocity = normal * vn_new + v_tan_new;
    return out;
}

ChainCollisionReport collide_chain(RopeChain& chain, std::span<const Vec3> prev_positions,
                                   std::span<const AnalyticSdf> bodies,
                                   std::span<const MotionSample> motions,
                                   const CollisionPolicy& policy) {
    assert(bodies.size() == motions.size());
    assert(prev_positions.size() == chain.bone_count());
    ChainCollisionReport report;
    if (bodies.empty()) return report;

    for (std::size_t i = 1; i < chain.bone_count(); ++i) {
        // Length first: it may remove the need for a collision entirely.
        auto [l_hat, len] = chain.segment_dir_len(i);
        if (len > chain.max_length(i))
            chain.bone(i).position = chain.bone(i - 1).position + l_hat * chain.max_length(i);

        // Collision last so a non-interpenetrating state is preserved.
        bool hit = false;
        for (std::size_t b = 0; b < bodies.size(); ++b) {
            const ResolveResult r =
                resolve_particle(prev_positions[i], chain.bone(i).position,
                                 chain.bone(i).velocity, bodies[b], motions[b], policy);
            chain.bone(i).position = r.position;
            chain.bone(i).velocity = r.velocity;
            hit = hit || r.collided;
            if (r.gradient_fallback) ++report.gradient_fallbacks;
            if (r.collided)
                report.min_phi_after =
                    std::min(report.min_phi_after, motions[b].phi_end(bodies[b], r.position));
        }
        if (hit) ++report.collided_bones;
    }
    return report;
}

}  // namespace ropecloth
