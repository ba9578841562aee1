#include "ropecloth/engine.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ropecloth/errors.hpp"

namespace ropecloth {

Vec3 Scene::gravity() const {
    Vec3 g;
    for (const ForceSpec& spec : forces)
        if (const auto* grav = std::get_if<GravityForce>(&spec)) g += grav->g;
    return g;
}

double mechanical_energy(const std::vector<RopeChain>& chains, const Vec3& gravity) {
    double e = 0.0;
    for (const RopeChain& chain : chains) {
        for (std::size_t i = 1; i < chain.bone_count(); ++i) {
            const VirtualBone& b = chain.bone(i);
            e += 0.5 * b.mass * b.velocity.norm2() - b.mass * gravity.dot(b.position);
        }
    }
    return e;
}

Engine::Engine(Scene scene) : scene_(std::move(scene)), chains_(scene_.chains) {
    if (scene_.dt <= 0.0) throw ConfigError("scene dt must be positive");
    if (scene_.chain_driver.size() != chains_.size())
        throw ConfigError("every chain root must be bound to a driver");
    for (std::size_t d : scene_.chain_driver)
        if (d >= scene_.drivers.size()) throw ConfigError("chain driver index out of range");
    tension_scratch_.resize(chains_.size());
    impulse_scratch_.resize(chains_.size());
    prev_positions_.resize(chains_.size());
    root_rest_.resize(chains_.size());
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        tension_scratch_[c].resize(chains_[c].segment_count());
        impulse_scratch_[c].resize(chains_[c].segment_count());
        // Driver keys are offsets applied to the chain's rest root, so one
        // driver can steer many chains rooted at different points.
        root_rest_[c] = chains_[c].bone(0).position;
        const auto& driver = scene_.drivers[scene_.chain_driver[c]];
        chains_[c].bone(0).position = root_rest_[c] + driver.position(0.0);
        chains_[c].bone(0).velocity = driver.sample(0.0, scene_.dt).velocity;
    }
}

void Engine::step() {
    const double dt = scene_.dt;
    const double t0 = time_;
    const double t1 = time_ + dt;

    for (std::size_t c = 0; c < chains_.size(); ++c) {
        prev_positions_[c].resize(chains_[c].bone_count());
        for (std::size_t i = 0; i < chains_[c].bone_count(); ++i)
            prev_positions_[c][i] = chains_[c].bone(i).position;
    }

    // (1) Tension solve + first half-kick + impulse solve, at time n state.
    for (std::size_t c = 0; c < chains_.size(); ++c)
        chains_[c].bone(0).velocity =
            scene_.drivers[scene_.chain_driver[c]].sample(t0, dt).velocity;
    eval_external_forces(chains_, scene_.forces, f_ext_);
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        RopeChain& chain = chains_[c];
        const auto& driver = scene_.drivers[scene_.chain_driver[c]];
        solve_tensions(chain, f_ext_[c], driver.sample(t0, dt).acceleration, scene_.solver,
                       tension_scratch_[c]);
        net_forces(chain, f_ext_[c], tension_scratch_[c], f_net_);
        // Mid-step root velocity is the displacement rate over the step, so
        // the impulse constraints see how positions actually move.
        const Vec3 root_mid = (driver.position(t1) - driver.position(t0)) / dt;
        velocity_half_step(chain, f_net_, dt, root_mid);
        solve_impulses(chain, scene_.solver, impulse_scratch_[c]);
    }

    // (2) Position sweep with the root advanced to time n+1. No impulse solve
    // here: for a taut rotating rope the sweep ends with the small outward
    // radial velocity that the second half-kick is about to cancel (plain
    // central differencing); an impulse at this point would eat it every
    // frame and damp the rotation.
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        RopeChain& chain = chains_[c];
        chain.bone(0).position =
            root_rest_[c] + scene_.drivers[scene_.chain_driver[c]].position(t1);
        advance_positions(chain, dt);
    }

    // (3) Collision + length sweep, then impulses.
    if (!scene_.bodies.empty()) {
        std::vector<AnalyticSdf> sdfs;
        std::vector<MotionSample> samples;
        sdfs.reserve(scene_.bodies.size());
        samples.reserve(scene_.bodies.size());
        for (const Body& body : scene_.bodies) {
            sdfs.push_back(body.sdf);
            samples.push_back(MotionSample::from(body.motion, t0, t1));
        }
        for (std::size_t c = 0; c < chains_.size(); ++c) {
            collide_chain(chains_[c], prev_positions_[c], sdfs, samples, scene_.collision);
            solve_impulses(chains_[c], scene_.solver, impulse_scratch_[c]);
        }
    }

    // (4) Tension solve at the new positions + second half-kick + impulses.
    for (std::size_t c = 0; c < chains_.size(); ++c)
        chains_[c].bone(0).velocity =
            scene_.drivers[scene_.chain_driver[c]].sample(t1, dt).velocity;
    eval_external_forces(chains_, scene_.forces, f_ext_);
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        RopeChain& chain = chains_[c];
        const auto& driver = scene_.drivers[scene_.chain_driver[c]];
        const DriverSample d1 = driver.sample(t1, dt);
        solve_tensions(chain, f_ext_[c], d1.acceleration, scene_.solver, tension_scratch_[c]);
        net_forces(chain, f_ext_[c], tension_scratch_[c], f_net_);
        velocity_half_step(chain, f_net_, dt, d1.velocity);
        solve_impulses(chain, scene_.solver, impulse_scratch_[c]);
    }

    time_ = t1;
    ++frame_;
    if (scene_.check_invariants) check_invariants();
}

void Engine::check_invariants() const {
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        const RopeChain& chain = chains_[c];
        for (std::size_t i = 0; i < chain.bone_count(); ++i) {
            if (!chain.bone(i).position.is_finite() || !chain.bone(i).velocity.is_finite())
                throw InvariantError("non-finite bone state in chain " + std::to_string(c));
        }
        const SolveScratch& ts = tension_scratch_[c];
        const SolveScratch& is = impulse_scratch_[c];
        for (std::size_t i = 1; i <= chain.segment_count(); ++i) {
            if (ts.tensions[i - 1] < 0.0 || is.impulses[i - 1] < 0.0)
                throw InvariantError("negative tension or impulse");
            const double l = chain.segment_dir_len(i).second;
            const bool slack = l < chain.max_length(i) * scene_.solver.taut_threshold;
            if (slack && (ts.tensions[i - 1] != 0.0 || is.impulses[i - 1] != 0.0))
                throw InvariantError("slack segment carries tension or impulse");
        }
    }
}

FrameRecord Engine::record() const {
    FrameRecord rec;
    rec.frame = frame_ - 1;  // describes the state after that step
    rec.time = time_;
    rec.positions.resize(chains_.size());
    rec.velocities.resize(chains_.size());
    rec.tensions.resize(chains_.size());
    rec.impulses.resize(chains_.size());
    rec.phi.resize(chains_.size());
    rec.min_phi = std::numeric_limits<double>::infinity();
    rec.energy = mechanical_energy(chains_, scene_.gravity());

    std::vector<RigidPose> poses;
    for (const Body& body : scene_.bodies) poses.push_back(body.motion.pose(time_));

    for (std::size_t c = 0; c < chains_.size(); ++c) {
        const RopeChain& chain = chains_[c];
        rec.positions[c].resize(chain.bone_count());
        rec.velocities[c].resize(chain.bone_count());
        rec.phi[c].resize(chain.bone_count());
        for (std::size_t i = 0; i < chain.bone_count(); ++i) {
            rec.positions[c][i] = chain.bone(i).position;
            rec.velocities[c][i] = chain.bone(i).velocity;
            double phi = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < scene_.bodies.size(); ++b)
                phi = std::min(phi, scene_.bodies[b].sdf.phi(
                                        poses[b].invert(chain.bone(i).position)));
            rec.phi[c][i] = phi;
            if (i > 0) rec.min_phi = std::min(rec.min_phi, phi);
        }
        rec.tensions[c] = tension_scratch_[c].tensions;
        rec.impulses[c] = impulse_scratch_[c].impulses;
        for (std::size_t i = 1; i <= chain.segment_count(); ++i) {
            const double l = chain.segment_dir_len(i).second;
            rec.max_length_violation =
                std::max(rec.max_length_violation, l / chain.max_length(i) - 1.0);
        }
        rec.solver_nonconverged +=
            (!tension_scratch_[c].converged) + (!impulse_scratch_[c].converged);
    }
    return rec;
}

std::vector<FrameRecord> Engine::run() {
    std::vector<FrameRecord> records;
    records.reserve(static_cast<std::size_t>(std::max(scene_.frames, 0)));
    for (int f = 0; f < scene_.frames; ++f) {
        step();
        records.push_back(record());
    }
    return records;
}

namespace {

void append_double(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), ",%.17g", v);
    line += buf;
}

}  // namespace

void write_frames_csv(std::ostream& os, const std::vector<FrameRecord>& records) {
    os << "frame,chain,bone,x,y,z,vx,vy,vz,tension_above,impulse_above,phi\n";
    std::string line;
    for (const FrameRecord& rec : records) {
        for (std::size_t c = 0; c < rec.positions.size(); ++c) {
            for (std::size_t i = 0; i < rec.positions[c].size(); ++i) {
                line.clear();
                line += std::to_string(rec.frame);
                line += ',';
                line += std::to_string(c);
                line += ',';
                line += std::to_string(i);
                const Vec3& x = rec.positions[c][i];
                const Vec3& v = rec.velocities[c][i];
                for (double d : {x.x, x.y, x.z, v.x, v.y, v.z}) append_double(line, d);
                append_double(line, i > 0 ? rec.tensions[c][i - 1] : 0.0);
                append_double(line, i > 0 ? rec.impulses[c][i - 1] : 0.0);
                append_double(line, rec.phi[c][i]);
                line += '\n';
                os << line;
            }
        }
    }
}

}  // namespace ropecloth
