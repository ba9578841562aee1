#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "ropecloth/rope_chain.hpp"

namespace ropecloth {

struct GravityForce {
    Vec3 g{0.0, -9.81, 0.0};  // m/s^2
};

struct WindForce {
    double drag = 0.0;  // N*s/m
    Vec3 wind_velocity;
};

/// Soft coupling between one bone on each of two chains.
struct LateralSpringForce {
    std::size_t chain_a = 0;
    std::size_t bone_a = 0;
    std::size_t chain_b = 0;
    std::size_t bone_b = 0;
    double stiffness = 0.0;    // N/m
    double rest_length = 0.0;  // m
};

/// Damping of each bone's velocity relative to its parent in the chain.
/// Applied to the child only; the kinematic root stays untouched.
struct RelativeDampingForce {
    double coefficient = 0.0;  // N*s/m
};

/// Placeholder for rest-angle preservation between consecutive segments.
/// Recognized by the config schema but rejected at validation time: no
/// force law is defined for it yet.
struct RestAngleForce {};

using ForceSpec = std::variant<GravityForce, WindForce, LateralSpringForce,
                               RelativeDampingForce, RestAngleForce>;

/// Sum of all force variants per bone; out[c][i] for bone i of chain c, with
/// out[c][0] always zero (kinematic roots take no external force). Lateral
/// springs contribute equal and opposite forces to the paired bones.
void eval_external_forces(const std::vector<RopeChain>& chains,
                          const std::vector<ForceSpec>& specs,
                          std::vector<std::vector<Vec3>>& out);

struct DriverSample {
    Vec3 position;
    Vec3 velocity;
    Vec3 acceleration;
};

struct DriverKey {
    double t = 0.0;
    Vec3 position;
};

/// Scripted root path: cubic Hermite through the keys with finite-difference
/// tangents (C1 at the knots), clamped to the end positions outside the key
/// range. Velocity and acceleration come from central differences with
/// stencil width dt, which is exact for quadratic paths on uniform keys.
class KinematicDriver {
  public:
    KinematicDriver() = default;
    explicit KinematicDriver(std::vector<DriverKey> keys);

    Vec3 position(double t) const;
    DriverSample sample(double t, double dt) const;
    const std::vector<DriverKey>& keys() const { return keys_; }

  private:
    std::vector<DriverKey> keys_;
    std::vector<Vec3> tangents_;
};

}  // namespace ropecloth
