#pragma once

#include <cmath>
#include <optional>

namespace ropecloth {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    constexpr double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }

    bool is_finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Fallback direction used wherever a unit vector is undefined (SDF medial
/// axis, degenerate segments with no cached direction).
inline constexpr Vec3 world_up() { return {0.0, 1.0, 0.0}; }

/// Unit vector along v, or `fallback` when |v| < eps.
Vec3 normalized_or(const Vec3& v, const Vec3& fallback, double eps = 1e-12);

/// Column-major 3x3 matrix; only rotation-flavored operations are provided.
struct Mat3 {
    // m[c] is column c.
    Vec3 col[3];

    static Mat3 identity();
    /// Rodrigues rotation matrix, right-hand rule about a unit axis.
    static Mat3 axis_angle(const Vec3& unit_axis, double angle);
    /// exp of the rotation vector w = axis * angle (handles |w| ~ 0).
    static Mat3 from_rotation_vector(const Vec3& w);

    Mat3 transposed() const;
    Vec3 operator*(const Vec3& v) const;
    Mat3 operator*(const Mat3& o) const;
};

/// Rotate v about a unit axis by theta (radians, right-hand rule).
/// Preserves |v| and the axis component of v.
Vec3 rotate_about_axis(const Vec3& v, const Vec3& unit_axis, double theta);

/// Coefficients of a*s^2 + b*s + c.
struct QuadraticCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Largest s in [0, interval_end] with q(s) = 0, using the sign-aware
/// stable quadratic formula. Degenerate cases: a=b=0, c!=0 -> nullopt;
/// a=b=c=0 -> interval_end (every s is a root, take the largest).
std::optional<double> largest_root_in_unit_interval(const QuadraticCoeffs& q,
                                                    double interval_end);

}  // namespace ropecloth
