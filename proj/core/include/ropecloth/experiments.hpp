#pragma once

#include <string>
#include <vector>

#include "ropecloth/engine.hpp"

namespace ropecloth {

/// Reference pendulum angles from RK4 on theta'' = -(g/l) sin theta, stepped
/// at most oracle_dt per substep and sampled every frame_dt. Independent of
/// the rope-chain code path.
struct PendulumOracle {
    std::vector<double> theta;  // theta[k] at t = k * frame_dt
    double period = 0.0;        // from the first quarter-period zero crossing

    static PendulumOracle compute(double amplitude_rad, double pendulum_length,
                                  double gravity, double frame_dt, int frames,
                                  double oracle_dt = 1e-5);
};

struct PendulumReport {
    double amplitude_rad = 0.0;
    double period = 0.0;               // oracle period, s
    double max_angle_error = 0.0;      // rad, sim vs oracle over the whole run
    double max_energy_drift_per_period = 0.0;  // fraction of the PE amplitude
    double elapsed_seconds = 0.0;      // wall clock of the rope-chain run
    int frames = 0;
};

/// Single-rope pendulum released from amplitude_deg, tolerance-mode solves,
/// compared frame-by-frame against the RK4 oracle over `periods` periods.
PendulumReport run_pendulum_comparison(double dt, double periods, double amplitude_deg,
                                       const SolverPolicy& solver);

struct SweepStudyEntry {
    std::string label;      // "1", "5", "10", "tol1e-06"
    double amplitude = 0.0; // peak |tip angle| over the post-3s window, rad
};

/// Swinging chain released from horizontal under different Gauss-Seidel
/// budgets; fewer sweeps damp the swing more.
std::vector<SweepStudyEntry> run_iteration_study(const std::vector<SolverPolicy>& policies,
                                                 double dt = 1.0 / 60.0,
                                                 double measure_after = 3.0,
                                                 double window = 2.0);

struct CollisionDemoTrace {
    // angle of each particle from the sphere's motion axis, measured from the
    // sphere center, per recorded step
    std::vector<std::vector<double>> angles;  // [step][particle]
    double max_angle = 0.0;                   // over the traversal
};

/// Sphere translating through a line of initially resting particles.
/// History-directed push-out keeps particles ahead of the sphere; the
/// gradient direction lets them slip around it.
CollisionDemoTrace run_collision_demo(PushoutDirection pushout, ProjectionNormal normal,
                                      double dt = 1.0 / 60.0);

}  // namespace ropecloth
