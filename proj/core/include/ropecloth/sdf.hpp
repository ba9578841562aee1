#pragma once

#include <variant>
#include <vector>

#include "ropecloth/geometry.hpp"

namespace ropecloth {

struct SphereSdf {
    Vec3 center;
    double radius = 1.0;
};

struct CapsuleSdf {
    Vec3 p0;
    Vec3 p1;
    double radius = 1.0;
};

struct RoundedBoxSdf {
    Vec3 center;
    Vec3 axis = world_up();  // rotation axis (unit)
    double angle = 0.0;      // radians
    Vec3 half_extents{0.5, 0.5, 0.5};
    double radius = 0.05;
};

using SdfPrimitive = std::variant<SphereSdf, CapsuleSdf, RoundedBoxSdf>;

double primitive_phi(const SdfPrimitive& p, const Vec3& x);
Vec3 primitive_grad(const SdfPrimitive& p, const Vec3& x);

/// Pointwise minimum over closed-form primitives. Each primitive's distance
/// is exact; inside overlaps the min-union is a lower bound of the true
/// distance, which is acceptable for collision response. Gradients come from
/// the minimizing primitive (ties break to the lowest index) and degenerate
/// interior points fall back to world_up().
class AnalyticSdf {
  public:
    AnalyticSdf() = default;
    explicit AnalyticSdf(std::vector<SdfPrimitive> primitives)
        : primitives_(std::move(primitives)) {}

    bool empty() const { return primitives_.empty(); }
    const std::vector<SdfPrimitive>& primitives() const { return primitives_; }

    double phi(const Vec3& x) const;
    Vec3 grad_phi(const Vec3& x) const;  // unit length

    /// Rough scene scale for defaulting epsilon: bounding-box diagonal.
    double bounding_diagonal() const;

  private:
    std::vector<SdfPrimitive> primitives_;
};

struct RigidPose {
    Mat3 rotation = Mat3::identity();
    Vec3 translation;

    Vec3 apply(const Vec3& local) const { return rotation * local + translation; }
    Vec3 invert(const Vec3& world) const {
        return rotation.transposed() * (world - translation);
    }
};

struct MotionKey {
    double t = 0.0;
    Vec3 translation;
    Vec3 rotation_vector;  // axis * angle
};

/// Keyframed rigid trajectory. Translations and rotation vectors interpolate
/// linearly between keys (clamped outside the key range); an empty key list
/// is the identity (stationary body).
class BodyMotion {
  public:
    BodyMotion() = default;
    explicit BodyMotion(std::vector<MotionKey> keys);

    RigidPose pose(double t) const;
    bool stationary() const;

  private:
    std::vector<MotionKey> keys_;
};

/// Poses bracketing one time step, precomputed once per step.
struct MotionSample {
    RigidPose begin;
    RigidPose end;
    double dt = 0.0;

    static MotionSample from(const BodyMotion& motion, double t0, double t1) {
        return {motion.pose(t0), motion.pose(t1), t1 - t0};
    }

    /// Transports a time-n point with the body so that its signed distance is
    /// preserved exactly: x_B = R1 R0^T (x - c0) + c1.
    Vec3 embed_point(const Vec3& x) const {
        return end.apply(begin.invert(x));
    }
    /// Velocity of the body material point currently at x (end-of-step frame).
    Vec3 body_velocity(const Vec3& x) const {
        if (dt <= 0.0) return {};
        return (x - begin.apply(end.invert(x))) / dt;
    }
    /// phi of the world point x against the moved body at the step end.
    double phi_end(const AnalyticSdf& sdf, const Vec3& x) const {
        return sdf.phi(end.invert(x));
    }
    Vec3 grad_end(const AnalyticSdf& sdf, const Vec3& x) const {
        return end.rotation * sdf.grad_phi(end.invert(x));
    }
};

}  // namespace ropecloth
