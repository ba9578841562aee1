#include "ropecloth/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace ropecloth {

Vec3 normalized_or(const Vec3& v, const Vec3& fallback, double eps) {
    const double n = v.norm();
    if (n < eps) return fallback;
    return v / n;
}

Mat3 Mat3::identity() {
    Mat3 m;
    m.col[0] = {1, 0, 0};
    m.col[1] = {0, 1, 0};
    m.col[2] = {0, 0, 1};
    return m;
}

Mat3 Mat3::axis_angle(const Vec3& unit_axis, double angle) {
    Mat3 m;
    m.col[0] = rotate_about_axis({1, 0, 0}, unit_axis, angle);
    m.col[1] = rotate_about_axis({0, 1, 0}, unit_axis, angle);
    m.col[2] = rotate_about_axis({0, 0, 1}, unit_axis, angle);
    return m;
}

Mat3 Mat3::from_rotation_vector(const Vec3& w) {
    const double angle = w.norm();
    if (angle < 1e-12) return identity();
    return axis_angle(w / angle, angle);
}

Mat3 Mat3::transposed() const {
    Mat3 m;
    m.col[0] = {col[0].x, col[1].x, col[2].x};
    m.col[1] = {col[0].y, col[1].y, col[2].y};
    m.col[2] = {col[0].z, col[1].z, col[2].z};
    return m;
}

Vec3 Mat3::operator*(const Vec3& v) const {
    return col[0] * v.x + col[1] * v.y + col[2] * v.z;
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 m;
    m.col[0] = (*this) * o.col[0];
    m.col[1] = (*this) * o.col[1];
    m.col[2] = (*this) * o.col[2];
    return m;
}

Vec3 rotate_about_axis(const Vec3& v, const Vec3& unit_axis, double theta) {
    assert(std::abs(unit_axis.norm() - 1.0) < 1e-9 && "axis must be unit length");
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return v * c + unit_axis.cross(v) * s + unit_axis * (unit_axis.dot(v) * (1.0 - c));
}

std::optional<double> largest_root_in_unit_interval(const QuadraticCoeffs& q,
                                                    double interval_end) {
    // Accept roots a hair outside the interval and clamp; callers hit the
    // endpoints exactly up to roundoff all the time.
    const double slack = 1e-12 * std::max(1.0, interval_end);
    const auto in_range = [&](double s) {
        return s >= -slack && s <= interval_end + slack;
    };
    const auto clamped = [&](double s) {
        return std::clamp(s, 0.0, interval_end);
    };

    if (q.a == 0.0) {
        if (q.b == 0.0) {
            if (q.c == 0.0) return interval_end;
            return std::nullopt;
        }
        const double s = -q.c / q.b;
        if (in_range(s)) return clamped(s);
        return std::nullopt;
    }

    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // t = -(b + sign(b)*sqrt(disc))/2 avoids cancellation; roots are t/a and c/t.
    const double t = -0.5 * (q.b + std::copysign(sq, q.b == 0.0 ? 1.0 : q.b));
    double r0 = t / q.a;
    double r1 = (t != 0.0) ? q.c / t : -q.b / (2.0 * q.a);

    std::optional<double> best;
    for (double r : {r0, r1}) {
        if (!std::isfinite(r) || !in_range(r)) continue;
        const double s = clamped(r);
        if (!best || s > *best) best = s;
    }
    return best;
}

}  // namespace ropecloth
