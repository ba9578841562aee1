#include "ropecloth/spring_mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "ropecloth/engine.hpp"

namespace ropecloth {

void SpringMesh::accumulate_forces(const Vec3& gravity, std::vector<Vec3>& out) const {
    out.assign(positions.size(), Vec3{});
    for (std::size_t v = 0; v < positions.size(); ++v)
        out[v] = gravity * masses[v] - velocities[v] * air_drag;
    for (const Spring& s : springs) {
        const Vec3 d = positions[s.i] - positions[s.j];
        const double len = d.norm();
        if (len < 1e-12) continue;
        const Vec3 dir = d / len;
        const double rel_speed = (velocities[s.i] - velocities[s.j]).dot(dir);
        const Vec3 f = dir * (-s.stiffness * (len - s.rest_length) - s.damping * rel_speed);
        out[s.i] += f;
        out[s.j] -= f;
    }
}

double SpringMesh::suggested_dt(double safety) const {
    // Gershgorin bound on the stiffness spectrum: per-vertex sum of incident
    // spring rates caps omega^2 at 2 * k_total / m.
    std::vector<double> k_total(positions.size(), 0.0);
    for (const Spring& s : springs) {
        k_total[s.i] += s.stiffness;
        k_total[s.j] += s.stiffness;
    }
    double omega_max = 0.0;
    for (std::size_t v = 0; v < positions.size(); ++v)
        omega_max = std::max(omega_max, std::sqrt(2.0 * k_total[v] / masses[v]));
    if (omega_max == 0.0) return 1.0 / 600.0;
    return std::min(1.0 / 600.0, safety * 2.0 / omega_max);
}

Patch build_patch(const PatchParams& params, std::span<const int> pinned_columns) {
    Patch patch;
    patch.nx = params.nx;
    patch.ny = params.ny;
    SpringMesh& mesh = patch.mesh;

    const double dx = params.width / (params.nx - 1);
    const double dy = params.height / (params.ny - 1);
    const double vertex_mass = params.total_mass / (params.nx * params.ny);

    for (int r = 0; r < params.ny; ++r)
        for (int c = 0; c < params.nx; ++c)
            mesh.positions.push_back({-0.5 * params.width + c * dx, -r * dy, 0.0});
    mesh.velocities.assign(mesh.positions.size(), Vec3{});
    mesh.masses.assign(mesh.positions.size(), vertex_mass);
    mesh.air_drag = params.air_drag;

    auto add_spring = [&](std::uint32_t i, std::uint32_t j, double k) {
        mesh.springs.push_back(
            {i, j, k, (mesh.positions[i] - mesh.positions[j]).norm(), params.spring_damping});
    };
    for (int r = 0; r < params.ny; ++r) {
        for (int c = 0; c < params.nx; ++c) {
            const std::uint32_t v = patch.vertex_id(r, c);
            if (c + 1 < params.nx)
                add_spring(v, patch.vertex_id(r, c + 1), params.structural_stiffness);
            if (r + 1 < params.ny)
                add_spring(v, patch.vertex_id(r + 1, c), params.structural_stiffness);
            if (c + 1 < params.nx && r + 1 < params.ny) {
                add_spring(v, patch.vertex_id(r + 1, c + 1), params.shear_stiffness);
                add_spring(patch.vertex_id(r, c + 1), patch.vertex_id(r + 1, c),
                           params.shear_stiffness);
            }
        }
    }
    for (int r = 0; r + 1 < params.ny; ++r) {
        for (int c = 0; c + 1 < params.nx; ++c) {
            patch.faces.push_back(
                {patch.vertex_id(r, c), patch.vertex_id(r + 1, c), patch.vertex_id(r, c + 1)});
            patch.faces.push_back({patch.vertex_id(r, c + 1), patch.vertex_id(r + 1, c),
                                   patch.vertex_id(r + 1, c + 1)});
        }
    }

    if (pinned_columns.empty()) {
        for (int c = 0; c < params.nx; ++c) mesh.pinned.push_back(patch.vertex_id(0, c));
    } else {
        for (int c : pinned_columns) mesh.pinned.push_back(patch.vertex_id(0, c));
    }
    for (std::uint32_t v : mesh.pinned) mesh.pinned_rest.push_back(mesh.positions[v]);
    return patch;
}

namespace {

void apply_pins(SpringMesh& mesh, const KinematicDriver& driver, double t, double dt) {
    const DriverSample s = driver.sample(t, dt);
    for (std::size_t k = 0; k < mesh.pinned.size(); ++k) {
        mesh.positions[mesh.pinned[k]] = mesh.pinned_rest[k] + s.position;
        mesh.velocities[mesh.pinned[k]] = s.velocity;
    }
}

bool is_pinned(const SpringMesh& mesh, std::size_t v) {
    return std::find(mesh.pinned.begin(), mesh.pinned.end(), v) != mesh.pinned.end();
}

}  // namespace

void step_mass_spring(SpringMesh& mesh, double dt, double t0, const Vec3& gravity,
                      const KinematicDriver& pin_driver,
                      std::span<const AnalyticSdf> bodies,
                      std::span<const MotionSample> motions,
                      const CollisionPolicy& policy) {
    const double t1 = t0 + dt;
    static thread_local std::vector<Vec3> forces;
    static thread_local std::vector<Vec3> prev;
    static thread_local std::vector<bool> pinned_mask;

    pinned_mask.assign(mesh.positions.size(), false);
    for (std::uint32_t v : mesh.pinned) pinned_mask[v] = true;

    apply_pins(mesh, pin_driver, t0, dt);
    mesh.accumulate_forces(gravity, forces);
    for (std::size_t v = 0; v < mesh.positions.size(); ++v)
        if (!pinned_mask[v]) mesh.velocities[v] += forces[v] * (0.5 * dt / mesh.masses[v]);

    prev = mesh.positions;
    for (std::size_t v = 0; v < mesh.positions.size(); ++v)
        if (!pinned_mask[v]) mesh.positions[v] += mesh.velocities[v] * dt;
    apply_pins(mesh, pin_driver, t1, dt);

    for (std::size_t v = 0; v < mesh.positions.size(); ++v) {
        if (pinned_mask[v]) continue;
        for (std::size_t b = 0; b < bodies.size(); ++b) {
            const ResolveResult r = resolve_particle(prev[v], mesh.positions[v],
                                                     mesh.velocities[v], bodies[b],
                                                     motions[b], policy);
            mesh.positions[v] = r.position;
            mesh.velocities[v] = r.velocity;
        }
    }

    mesh.accumulate_forces(gravity, forces);
    for (std::size_t v = 0; v < mesh.positions.size(); ++v)
        if (!pinned_mask[v]) mesh.velocities[v] += forces[v] * (0.5 * dt / mesh.masses[v]);
}

namespace {

// Flag on a vertical pole: coarse nx x ny grid, vertex (r, c) at
// (c*dx, -r*dy, 0), the whole left column pinned. Gravity drapes the free
// fabric downward, which requires the lattice to shear by up to 90 degrees.
Patch build_flag(double k, double shear_ratio, int nx, int ny, double width, double height) {
    PatchParams params;
    params.nx = nx;
    params.ny = ny;
    params.width = width;
    params.height = height;
    params.total_mass = 0.05;
    params.structural_stiffness = k;
    params.shear_stiffness = shear_ratio * k;
    params.spring_damping = 0.004 * std::sqrt(k);
    params.air_drag = 8e-4;
    Patch patch = build_patch(params, std::vector<int>{});

    // Re-pin: the builder pins the top row; a flag hangs off its left edge.
    patch.mesh.pinned.clear();
    patch.mesh.pinned_rest.clear();
    for (int r = 0; r < ny; ++r) {
        patch.mesh.pinned.push_back(patch.vertex_id(r, 0));
        patch.mesh.pinned_rest.push_back(patch.mesh.positions[patch.vertex_id(r, 0)]);
    }
    return patch;
}

}  // namespace

FlagExperimentResult run_flag_experiment(std::span<const double> stiffness_list) {
    FlagExperimentResult result;
    const Vec3 gravity{0, -9.81, 0};
    const KinematicDriver still({{0.0, {0, 0, 0}}});
    const int nx = 13, ny = 5;
    const double width = 0.5, height = 0.16;
    const double lowest_pin_y = -height;

    for (double k : stiffness_list) {
        Patch patch = build_flag(k, 0.25, nx, ny, width, height);
        const double dt = patch.mesh.suggested_dt();
        const int steps = static_cast<int>(std::ceil(16.0 / dt));
        for (int s = 0; s < steps; ++s)
            step_mass_spring(patch.mesh, dt, s * dt, gravity, still, {}, {}, {});

        double min_y = lowest_pin_y;
        for (const Vec3& p : patch.mesh.positions) min_y = std::min(min_y, p.y);
        result.stiffness.push_back(k);
        result.extent.push_back(lowest_pin_y - min_y);  // reach below the lowest pin
    }

    // Rope chains rooted at the pole nodes, bones along each row; released
    // from the same horizontal rest state, they drape to exactly their
    // summed segment lengths below their pins.
    Patch patch = build_flag(60.0, 0.25, nx, ny, width, height);
    const double dx = width / (nx - 1);
    Scene scene;
    scene.dt = 1.0 / 600.0;
    scene.solver = SolverPolicy::tolerance(1e-8);
    scene.forces = {GravityForce{gravity}, RelativeDampingForce{0.01}, WindForce{8e-3, {}}};
    scene.drivers = {still};
    const std::vector<int> bone_cols{2, 4, 6, 8, 10, 12};
    for (int r = 0; r < ny; ++r) {
        std::vector<VirtualBone> bones{{patch.mesh.positions[patch.vertex_id(r, 0)], {}, 0.0}};
        std::vector<double> lens;
        int prev_col = 0;
        for (int c : bone_cols) {
            bones.push_back({patch.mesh.positions[patch.vertex_id(r, c)], {}, 0.004});
            lens.push_back((c - prev_col) * dx);
            prev_col = c;
        }
        scene.chains.emplace_back(std::move(bones), std::move(lens));
        scene.chain_driver.push_back(0);
    }
    result.rope_total_length = (nx - 1) * dx;

    Engine engine(scene);
    for (int s = 0; s < 6000; ++s) engine.step();  // 10 s, settles vertical
    double min_y = lowest_pin_y;
    for (const RopeChain& chain : engine.chains())
        for (std::size_t i = 0; i < chain.bone_count(); ++i)
            min_y = std::min(min_y, chain.bone(i).position.y);
    result.rope_extent = lowest_pin_y - min_y;
    return result;
}

}  // namespace ropecloth
