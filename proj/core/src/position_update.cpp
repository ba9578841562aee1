#include "ropecloth/position_update.hpp"

#include <cassert>
#include <cmath>

namespace ropecloth {

PositionStepReport advance_positions(RopeChain& chain, double dt) {
    assert(dt > 0.0);
    const std::size_t m = chain.segment_count();
    PositionStepReport report;
    report.branch.assign(m, PositionBranch::Slack);
    report.s_root.assign(m, dt);

    for (std::size_t i = 1; i <= m; ++i) {
        VirtualBone& bone = chain.bone(i);
        const Vec3 parent = chain.bone(i - 1).position;  // already at time n+1
        const Vec3 v = bone.velocity;
        const double l_max = chain.max_length(i);

        // f(s) = |x^n + s v - parent|^2 - l_max^2
        const Vec3 offset = bone.position - parent;
        const QuadraticCoeffs f{v.norm2(), 2.0 * offset.dot(v), offset.norm2() - l_max * l_max};
        const double f_end = (f.a * dt + f.b) * dt + f.c;
        if (f_end <= 0.0) {
            bone.position += v * dt;
            continue;
        }

        double s_root;
        if (auto root = largest_root_in_unit_interval(f, dt)) {
            s_root = *root;
            bone.position += v * s_root;
            report.branch[i - 1] = PositionBranch::TautRotated;
        } else {
            // Entered the step overstretched with no recovery root: snap back
            // onto the sphere and rotate for the whole step.
            s_root = 0.0;
            bone.position = parent + normalized_or(offset, chain.segment_dir_len(i).first) * l_max;
            report.branch[i - 1] = PositionBranch::ProjectedThenRotated;
        }
        report.s_root[i - 1] = s_root;

        const Vec3 lever = bone.position - parent;
        const Vec3 l_hat = normalized_or(lever, chain.segment_dir_len(i).first);
        const Vec3 v_tan = v - l_hat * v.dot(l_hat);
        const double tan_speed = v_tan.norm();
        if (tan_speed < 1e-12) continue;  // rests on the sphere

        const double theta = tan_speed * (dt - s_root) / l_max;
        const Vec3 axis = l_hat.cross(v_tan / tan_speed);
        bone.position = parent + rotate_about_axis(lever, axis, theta);
    }
    return report;
}

}  // namespace ropecloth
