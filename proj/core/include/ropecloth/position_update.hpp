#pragma once

#include <vector>

#include "ropecloth/rope_chain.hpp"

namespace ropecloth {

enum class PositionBranch { Slack, TautRotated, ProjectedThenRotated };

struct PositionStepReport {
    std::vector<PositionBranch> branch;  // per segment
    std::vector<double> s_root;          // in [0, dt]; dt for slack segments
};

/// Root-to-tip position sweep. Velocities are the midstep values and the root
/// must already sit at its time n+1 position. A bone moves freely while its
/// rope stays short; once the rope would overstretch it travels freely up to
/// the largest root of the tautness quadratic and spends the remaining time
/// rotating on the great circle around its parent, which keeps the full
/// tangential arc length instead of damping it to the linearized rotation.
/// Bone velocities are left untouched; impulses reconcile them afterwards.
/// Postcondition: every segment length <= l_max * (1 + 1e-9).
PositionStepReport advance_positions(RopeChain& chain, double dt);

}  // namespace ropecloth
