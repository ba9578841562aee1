#pragma once

#include <iosfwd>
#include <vector>

#include "ropecloth/collision.hpp"
#include "ropecloth/forces.hpp"
#include "ropecloth/position_update.hpp"
#include "ropecloth/rope_solver.hpp"
#include "ropecloth/sdf.hpp"

namespace ropecloth {

struct Body {
    AnalyticSdf sdf;
    BodyMotion motion;
};

struct Scene {
    std::vector<RopeChain> chains;
    // Driver index per chain. A driver's keyed path is an offset added to the
    // chain's rest root position, so chains rooted apart can share a driver.
    std::vector<std::size_t> chain_driver;
    std::vector<KinematicDriver> drivers;
    std::vector<Body> bodies;
    std::vector<ForceSpec> forces;
    SolverPolicy solver;
    CollisionPolicy collision;
    double dt = 1.0 / 600.0;
    int frames = 0;
    bool check_invariants = true;

    Vec3 gravity() const;  // summed over gravity force specs
};

struct FrameRecord {
    int frame = 0;
    double time = 0.0;
    std::vector<std::vector<Vec3>> positions;   // [chain][bone]
    std::vector<std::vector<Vec3>> velocities;
    std::vector<std::vector<double>> tensions;  // [chain][segment]
    std::vector<std::vector<double>> impulses;
    std::vector<std::vector<double>> phi;       // [chain][bone], +inf without bodies
    double energy = 0.0;
    double min_phi = 0.0;
    double max_length_violation = 0.0;  // max over segments of l/l_max - 1
    int solver_nonconverged = 0;
};

/// Sum of kinetic and gravitational potential energy over non-kinematic bones.
double mechanical_energy(const std::vector<RopeChain>& chains, const Vec3& gravity);

/// Advances the scene with the central-differencing scheme:
///  1. tension solve + first velocity half-kick, impulse solve
///  2. root-to-tip position sweep, impulse solve
///  3. collision + length sweep, impulse solve
///  4. tension solve at the new positions + second half-kick, impulse solve
/// Runs are deterministic: fixed iteration orders, no randomness, identical
/// reruns produce bit-identical records.
class Engine {
  public:
    explicit Engine(Scene scene);

    void step();
    FrameRecord record() const;
    std::vector<FrameRecord> run();  // scene.frames steps, one record each

    double time() const { return time_; }
    int frame() const { return frame_; }
    const std::vector<RopeChain>& chains() const { return chains_; }
    std::vector<RopeChain>& chains() { return chains_; }
    const Scene& scene() const { return scene_; }

  private:
    void check_invariants() const;

    Scene scene_;
    std::vector<RopeChain> chains_;
    std::vector<SolveScratch> tension_scratch_;
    std::vector<SolveScratch> impulse_scratch_;
    std::vector<std::vector<Vec3>> f_ext_;
    std::vector<Vec3> f_net_;
    std::vector<std::vector<Vec3>> prev_positions_;
    std::vector<Vec3> root_rest_;
    double time_ = 0.0;
    int frame_ = 0;
};

/// One row per bone per frame:
/// frame,chain,bone,x,y,z,vx,vy,vz,tension_above,impulse_above,phi
/// Doubles are printed with %.17g (lossless round-trip); root bones carry
/// zero tension/impulse; phi is "inf" when the scene has no bodies.
void write_frames_csv(std::ostream& os, const std::vector<FrameRecord>& records);

}  // namespace ropecloth
