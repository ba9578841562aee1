#include "ropecloth/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace ropecloth {

PendulumOracle PendulumOracle::compute(double amplitude_rad, double pendulum_length,
                                       double gravity, double frame_dt, int frames,
                                       double oracle_dt) {
    const int substeps = static_cast<int>(std::ceil(frame_dt / oracle_dt));
    const double h = frame_dt / substeps;
    const double k = gravity / pendulum_length;

    PendulumOracle oracle;
    oracle.theta.reserve(frames + 1);
    double theta = amplitude_rad;
    double omega = 0.0;
    oracle.theta.push_back(theta);

    double quarter_time = 0.0;
    double t = 0.0;
    double prev_theta = theta;
    for (int f = 1; f <= frames; ++f) {
        for (int s = 0; s < substeps; ++s) {
            const auto accel = [k](double th) { return -k * std::sin(th); };
            const double k1t = omega, k1w = accel(theta);
            const double k2t = omega + 0.5 * h * k1w, k2w = accel(theta + 0.5 * h * k1t);
            const double k3t = omega + 0.5 * h * k2w, k3w = accel(theta + 0.5 * h * k2t);
            const double k4t = omega + h * k3w, k4w = accel(theta + h * k3t);
            prev_theta = theta;
            theta += h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
            omega += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
            t += h;
            if (quarter_time == 0.0 && prev_theta > 0.0 && theta <= 0.0) {
                // Linear interpolation of the zero crossing.
                quarter_time = t - h + h * prev_theta / (prev_theta - theta);
            }
        }
        oracle.theta.push_back(theta);
    }
    oracle.period = 4.0 * quarter_time;
    return oracle;
}

PendulumReport run_pendulum_comparison(double dt, double periods, double amplitude_deg,
                                       const SolverPolicy& solver) {
    const double g = 9.81;
    const double length = 0.5;
    const double mass = 0.05;
    const double amplitude = amplitude_deg * M_PI / 180.0;

    // Period estimate to size the run; refined by the oracle afterwards.
    const double small_period = 2.0 * M_PI * std::sqrt(length / g);
    const int frames = static_cast<int>(std::ceil(periods * 1.1 * small_period / dt));
    const PendulumOracle oracle =
        PendulumOracle::compute(amplitude, length, g, dt, frames);
    const int run_frames =
        std::min(frames, static_cast<int>(std::ceil(periods * oracle.period / dt)));

    Scene scene;
    scene.dt = dt;
    scene.frames = run_frames;
    scene.solver = solver;
    scene.forces = {GravityForce{{0, -g, 0}}};
    scene.drivers = {KinematicDriver({{0.0, {0, 0, 0}}})};
    scene.chain_driver = {0};
    scene.chains.emplace_back(
        std::vector<VirtualBone>{
            {{0, 0, 0}, {}, 0.0},
            {{length * std::sin(amplitude), -length * std::cos(amplitude), 0}, {}, mass}},
        std::vector<double>{length});

    const auto start = std::chrono::steady_clock::now();
    Engine engine(scene);
    PendulumReport report;
    report.amplitude_rad = amplitude;
    report.period = oracle.period;
    report.frames = run_frames;

    const double e0 = mechanical_energy(engine.chains(), scene.gravity());
    const double e_scale = mass * g * length * (1.0 - std::cos(amplitude));
    double period_start_energy = e0;
    int next_period = 1;
    for (int f = 1; f <= run_frames; ++f) {
        engine.step();
        const Vec3 p = engine.chains()[0].bone(1).position;
        const double theta = std::atan2(p.x, -p.y);
        report.max_angle_error =
            std::max(report.max_angle_error, std::abs(theta - oracle.theta[f]));
        if (engine.time() >= next_period * oracle.period) {
            const double e = mechanical_energy(engine.chains(), scene.gravity());
            report.max_energy_drift_per_period =
                std::max(report.max_energy_drift_per_period,
                         std::abs(e - period_start_energy) / e_scale);
            period_start_energy = e;
            ++next_period;
        }
    }
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<SweepStudyEntry> run_iteration_study(const std::vector<SolverPolicy>& policies,
                                                 double dt, double measure_after,
                                                 double window) {
    std::vector<SweepStudyEntry> entries;
    for (const SolverPolicy& policy : policies) {
        Scene scene;
        scene.dt = dt;
        scene.solver = policy;
        scene.forces = {GravityForce{}};
        scene.drivers = {KinematicDriver({{0.0, {0, 0, 0}}})};
        scene.chain_driver = {0};
        // 8 bones released from horizontal.
        std::vector<VirtualBone> bones{{{0, 0, 0}, {}, 0.0}};
        std::vector<double> lens;
        for (int i = 1; i <= 8; ++i) {
            bones.push_back({{0.1 * i, 0, 0}, {}, 0.05});
            lens.push_back(0.1);
        }
        scene.chains.emplace_back(std::move(bones), std::move(lens));

        Engine engine(scene);
        double amplitude = 0.0;
        const int total = static_cast<int>(std::ceil((measure_after + window) / dt));
        for (int f = 0; f < total; ++f) {
            engine.step();
            if (engine.time() < measure_after) continue;
            const Vec3 tip = engine.chains()[0].bone(8).position;
            amplitude = std::max(amplitude, std::abs(std::atan2(tip.x, -tip.y)));
        }

        char label[32];
        if (policy.mode == SolverPolicy::Mode::FixedSweeps)
            std::snprintf(label, sizeof(label), "%d", policy.sweeps);
        else
            std::snprintf(label, sizeof(label), "tol%g", policy.epsilon);
        entries.push_back({label, amplitude});
    }
    return entries;
}

CollisionDemoTrace run_collision_demo(PushoutDirection pushout, ProjectionNormal normal,
                                      double dt) {
    const double radius = 0.25;
    const double speed = 1.0;
    const double travel_time = 2.4;

    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, radius}});
    BodyMotion motion({{0.0, {-1.2, 0, 0}, {}},
                       {travel_time, {-1.2 + speed * travel_time, 0, 0}, {}}});

    CollisionPolicy policy;
    policy.pushout = pushout;
    policy.normal = normal;
    policy.epsilon = 2e-3;
    policy.pushout_iterations = 1;  // deliberately the cheap real-time setting

    // Six initially resting particles slightly off the motion axis.
    std::vector<Vec3> xs, vs;
    for (double off : {0.02, 0.05, 0.08}) {
        xs.push_back({0.0, off, 0.0});
        xs.push_back({0.0, -off, 0.3 * off});
    }
    vs.assign(xs.size(), Vec3{});

    CollisionDemoTrace trace;
    const int steps = static_cast<int>(std::ceil(travel_time / dt));
    for (int s = 0; s < steps; ++s) {
        const double t0 = s * dt;
        const double t1 = t0 + dt;
        const auto sample = MotionSample::from(motion, t0, t1);
        std::vector<double> row;
        for (std::size_t p = 0; p < xs.size(); ++p) {
            const Vec3 x_prev = xs[p];
            const Vec3 x_pred = xs[p] + vs[p] * dt;  // force-free particles
            const auto r = resolve_particle(x_prev, x_pred, vs[p], sdf, sample, policy);
            xs[p] = r.position;
            vs[p] = r.velocity;

            const Vec3 center = sample.end.translation;
            const Vec3 rel = xs[p] - center;
            const double angle = std::atan2(std::sqrt(rel.y * rel.y + rel.z * rel.z), rel.x);
            row.push_back(angle);
            // Only count the traversal while the sphere can still reach them.
            if (center.x < 0.6)
                trace.max_angle = std::max(trace.max_angle, angle);
        }
        trace.angles.push_back(std::move(row));
    }
    return trace;
}

}  // namespace ropecloth
