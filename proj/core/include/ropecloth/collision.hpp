#pragma once

#include <span>
#include <vector>

#include "ropecloth/rope_chain.hpp"
#include "ropecloth/sdf.hpp"

namespace ropecloth {

enum class PushoutDirection { Gradient, History, Bisection };
enum class ProjectionNormal { Gradient, History };

struct CollisionPolicy {
    PushoutDirection pushout = PushoutDirection::History;
    ProjectionNormal normal = ProjectionNormal::History;
    double epsilon = 1e-3;    // m, surface shell thickness
    int pushout_iterations = 1;
    double friction = 0.0;    // mu >= 0
};

struct ResolveResult {
    Vec3 position;
    Vec3 velocity;
    bool collided = false;
    // Set when the embedded prior point was itself interpenetrating (history
    // direction invalid) and the gradient direction was used instead.
    bool gradient_fallback = false;
};

/// Collision response for one particle against one moving body.
///
/// A particle ending the step closer than epsilon to the body keeps being
/// treated: while actually interpenetrating (phi < 0) it is pushed by
/// |phi| + epsilon along the configured direction (the reverse of its path in
/// the body frame by default, which cannot shove it around thin or highly
/// curved geometry the way the gradient can). The normal velocity is then
/// clamped to the body's (never inward) and friction scales the relative
/// tangential velocity without ever reversing it.
///
/// Bisection push-out searches the phi = epsilon crossing along the particle
/// path; it is only meaningful for stationary bodies and falls back to the
/// history direction (with the fallback flag) when the body moves.
ResolveResult resolve_particle(const Vec3& x_prev, const Vec3& x_new, const Vec3& v,
                               const AnalyticSdf& sdf, const MotionSample& motion,
                               const CollisionPolicy& policy);

struct ChainCollisionReport {
    int collided_bones = 0;
    int gradient_fallbacks = 0;
    double min_phi_after = 0.0;  // most negative phi seen after resolution
};

/// Root-to-tip collision sweep over the non-kinematic bones: each bone gets
/// its rope length clamped first, then the collision response, in that order
/// exactly once, so a non-interpenetrating state always wins over length.
/// prev_positions are the bone positions at time n (before the position
/// update), used for the history direction. Bodies are processed in order.
ChainCollisionReport collide_chain(RopeChain& chain, std::span<const Vec3> prev_positions,
                                   std::span<const AnalyticSdf> bodies,
                                   std::span<const MotionSample> motions,
                                   const CollisionPolicy& policy);

}  // namespace ropecloth
