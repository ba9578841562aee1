#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ropecloth/collision.hpp"
#include "ropecloth/forces.hpp"

namespace ropecloth {

struct Spring {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double stiffness = 0.0;    // N/m
    double rest_length = 0.0;  // m
    double damping = 0.0;      // N*s/m along the spring
};

/// Mass-spring cloth used as the conventional reference: Figure-style locking
/// comparisons and ground-truth data generation. Pinned vertices follow their
/// rest position offset by a driver path.
struct SpringMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<double> masses;
    std::vector<Spring> springs;
    std::vector<std::uint32_t> pinned;
    std::vector<Vec3> pinned_rest;
    double air_drag = 0.0;  // N*s/m, -c*v per vertex

    /// Spring + gravity + drag forces; pairwise spring terms are equal and
    /// opposite so an unpinned mesh conserves momentum exactly.
    void accumulate_forces(const Vec3& gravity, std::vector<Vec3>& out) const;

    /// Largest stable explicit time step scale: 2/omega_max with a margin.
    double suggested_dt(double safety = 0.5) const;
};

struct PatchParams {
    int nx = 20;                      // vertices per row
    int ny = 20;                      // rows
    double width = 0.5;               // m
    double height = 0.5;              // m
    double total_mass = 0.08;         // kg
    double structural_stiffness = 60;
    double shear_stiffness = 30;
    double spring_damping = 0.05;
    double air_drag = 2e-4;
};

struct Patch {
    SpringMesh mesh;
    std::vector<std::array<std::uint32_t, 3>> faces;
    int nx = 0;
    int ny = 0;

    std::uint32_t vertex_id(int row, int col) const {
        return static_cast<std::uint32_t>(row * nx + col);
    }
};

/// Rectangular patch in the x/y plane, top row at y = 0, hanging toward -y.
/// pinned_columns selects top-row vertices to pin (all columns when empty).
Patch build_patch(const PatchParams& params, std::span<const int> pinned_columns);

/// One central-differencing step (the same scheme the rope chains use), with
/// SDF collisions resolved per non-pinned vertex using the given policy.
/// The driver path offsets pinned vertices from their rest positions.
void step_mass_spring(SpringMesh& mesh, double dt, double t0, const Vec3& gravity,
                      const KinematicDriver& pin_driver,
                      std::span<const AnalyticSdf> bodies,
                      std::span<const MotionSample> motions,
                      const CollisionPolicy& policy);

struct FlagExperimentResult {
    std::vector<double> stiffness;
    std::vector<double> extent;  // steady-state vertical extent per stiffness
    double rope_extent = 0.0;
    double rope_total_length = 0.0;  // sum of l_max down one chain
};

/// Figure-2-style comparison: a patch pinned at a few top-row nodes drapes
/// under gravity at each stiffness; rope chains rooted at the same pins hang
/// to exactly their total length. Stiff lattices lock (tilted, short reach),
/// weak ones overstretch. Extent is pin height minus the lowest vertex.
FlagExperimentResult run_flag_experiment(std::span<const double> stiffness_list);

}  // namespace ropecloth
