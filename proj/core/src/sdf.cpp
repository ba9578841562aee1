#include "ropecloth/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ropecloth {

namespace {

Vec3 perpendicular_fallback(const Vec3& axis_unit) {
    Vec3 n = world_up() - axis_unit * world_up().dot(axis_unit);
    if (n.norm2() < 1e-12) {
        const Vec3 alt{1, 0, 0};
        n = alt - axis_unit * alt.dot(axis_unit);
    }
    return normalized_or(n, world_up());
}

double sphere_phi(const SphereSdf& s, const Vec3& x) {
    return (x - s.center).norm() - s.radius;
}

Vec3 sphere_grad(const SphereSdf& s, const Vec3& x) {
    return normalized_or(x - s.center, world_up());
}

Vec3 capsule_closest_axis_point(const CapsuleSdf& c, const Vec3& x) {
    const Vec3 seg = c.p1 - c.p0;
    const double len2 = seg.norm2();
    if (len2 < 1e-24) return c.p0;
    const double t = std::clamp((x - c.p0).dot(seg) / len2, 0.0, 1.0);
    return c.p0 + seg * t;
}

double capsule_phi(const CapsuleSdf& c, const Vec3& x) {
    return (x - capsule_closest_axis_point(c, x)).norm() - c.radius;
}

Vec3 capsule_grad(const CapsuleSdf& c, const Vec3& x) {
    const Vec3 d = x - capsule_closest_axis_point(c, x);
    if (d.norm2() < 1e-24) {
        // On the axis: any perpendicular is outward; pick a deterministic one.
        const Vec3 seg = c.p1 - c.p0;
        return perpendicular_fallback(normalized_or(seg, world_up()));
    }
    return d / d.norm();
}

struct BoxFrame {
    Mat3 rot;
    Vec3 local;
};

BoxFrame box_local(const RoundedBoxSdf& b, const Vec3& x) {
    const Mat3 rot = Mat3::axis_angle(normalized_or(b.axis, world_up()), b.angle);
    return {rot, rot.transposed() * (x - b.center)};
}

double rounded_box_phi(const RoundedBoxSdf& b, const Vec3& x) {
    const Vec3 p = box_local(b, x).local;
    const Vec3 q{std::abs(p.x) - b.half_extents.x, std::abs(p.y) - b.half_extents.y,
                 std::abs(p.z) - b.half_extents.z};
    const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
    const double inside = std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
    return outside.norm() + inside - b.radius;
}

Vec3 rounded_box_grad(const RoundedBoxSdf& b, const Vec3& x) {
    const auto [rot, p] = box_local(b, x);
    const Vec3 q{std::abs(p.x) - b.half_extents.x, std::abs(p.y) - b.half_extents.y,
                 std::abs(p.z) - b.half_extents.z};
    const auto sgn = [](double v) { return v < 0.0 ? -1.0 : 1.0; };
    Vec3 g;
    if (q.x > 0.0 || q.y > 0.0 || q.z > 0.0) {
        const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
        g = Vec3{sgn(p.x) * outside.x, sgn(p.y) * outside.y, sgn(p.z) * outside.z};
        g = normalized_or(g, world_up());
    } else {
        // Interior: steepest ascent is along the least-deep face axis.
        if (q.x >= q.y && q.x >= q.z) g = {sgn(p.x), 0, 0};
        else if (q.y >= q.z) g = {0, sgn(p.y), 0};
        else g = {0, 0, sgn(p.z)};
    }
    return rot * g;
}

}  // namespace

double primitive_phi(const SdfPrimitive& p, const Vec3& x) {
    return std::visit([&](const auto& prim) -> double {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, SphereSdf>) return sphere_phi(prim, x);
        else if constexpr (std::is_same_v<T, CapsuleSdf>) return capsule_phi(prim, x);
        else return rounded_box_phi(prim, x);
    }, p);
}

Vec3 primitive_grad(const SdfPrimitive& p, const Vec3& x) {
    return std::visit([&](const auto& prim) -> Vec3 {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, SphereSdf>) return sphere_grad(prim, x);
        else if constexpr (std::is_same_v<T, CapsuleSdf>) return capsule_grad(prim, x);
        else return rounded_box_grad(prim, x);
    }, p);
}

double AnalyticSdf::phi(const Vec3& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : primitives_) best = std::min(best, primitive_phi(p, x));
    return best;
}

Vec3 AnalyticSdf::grad_phi(const Vec3& x) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < primitives_.size(); ++i) {
        const double d = primitive_phi(primitives_[i], x);
        if (d < best) {  // strict: ties keep the lowest index
            best = d;
            best_i = i;
        }
    }
    if (primitives_.empty()) return world_up();
    return primitive_grad(primitives_[best_i], x);
}

double AnalyticSdf::bounding_diagonal() const {
    if (primitives_.empty()) return 1.0;
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};
    auto grow = [&](const Vec3& c, double r) {
        lo = {std::min(lo.x, c.x - r), std::min(lo.y, c.y - r), std::min(lo.z, c.z - r)};
        hi = {std::max(hi.x, c.x + r), std::max(hi.y, c.y + r), std::max(hi.z, c.z + r)};
    };
    for (const auto& p : primitives_) {
        std::visit([&](const auto& prim) {
            using T = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<T, SphereSdf>) {
                grow(prim.center, prim.radius);
            } else if constexpr (std::is_same_v<T, CapsuleSdf>) {
                grow(prim.p0, prim.radius);
                grow(prim.p1, prim.radius);
            } else {
                const double reach =
                    prim.half_extents.norm() + prim.radius;
                grow(prim.center, reach);
            }
        }, p);
    }
    return (hi - lo).norm();
}

BodyMotion::BodyMotion(std::vector<MotionKey> keys) : keys_(std::move(keys)) {}

RigidPose BodyMotion::pose(double t) const {
    if (keys_.empty()) return {};
    if (keys_.size() == 1 || t <= keys_.front().t) {
        const MotionKey& k = (t <= keys_.front().t) ? keys_.front() : keys_.back();
        return {Mat3::from_rotation_vector(k.rotation_vector), k.translation};
    }
    if (t >= keys_.back().t) {
        const MotionKey& k = keys_.back();
        return {Mat3::from_rotation_vector(k.rotation_vector), k.translation};
    }
    std::size_t hi = 1;
    while (keys_[hi].t < t) ++hi;
    const MotionKey& a = keys_[hi - 1];
    const MotionKey& b = keys_[hi];
    const double s = (t - a.t) / (b.t - a.t);
    const Vec3 tr = a.translation + (b.translation - a.translation) * s;
    const Vec3 rv = a.rotation_vector + (b.rotation_vector - a.rotation_vector) * s;
    return {Mat3::from_rotation_vector(rv), tr};
}

bool BodyMotion::stationary() const {
    if (keys_.size() < 2) return true;
    for (std::size_t i = 1; i < keys_.size(); ++i) {
        if ((keys_[i].translation - keys_[0].translation).norm2() > 0.0) return false;
        if ((keys_[i].rotation_vector - keys_[0].rotation_vector).norm2() > 0.0) return false;
    }
    return true;
}

}  // namespace ropecloth
