#include "ropecloth/forces.hpp"

#include <algorithm>
#include <cassert>

namespace ropecloth {

void eval_external_forces(const std::vector<RopeChain>& chains,
                          const std::vector<ForceSpec>& specs,
                          std::vector<std::vector<Vec3>>& out) {
    out.resize(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c)
        out[c].assign(chains[c].bone_count(), Vec3{});

    for (const ForceSpec& spec : specs) {
        if (const auto* g = std::get_if<GravityForce>(&spec)) {
            for (std::size_t c = 0; c < chains.size(); ++c)
                for (std::size_t i = 1; i < chains[c].bone_count(); ++i)
                    out[c][i] += g->g * chains[c].bone(i).mass;
        } else if (const auto* w = std::get_if<WindForce>(&spec)) {
            for (std::size_t c = 0; c < chains.size(); ++c)
                for (std::size_t i = 1; i < chains[c].bone_count(); ++i)
                    out[c][i] += (w->wind_velocity - chains[c].bone(i).velocity) * w->drag;
        } else if (const auto* s = std::get_if<LateralSpringForce>(&spec)) {
            const Vec3 xa = chains[s->chain_a].bone(s->bone_a).position;
            const Vec3 xb = chains[s->chain_b].bone(s->bone_b).position;
            const Vec3 d = xa - xb;
            const double len = d.norm();
            if (len < 1e-12) continue;  // direction undefined, no force
            const Vec3 f = d * (-s->stiffness * (len - s->rest_length) / len);
            if (s->bone_a != 0) out[s->chain_a][s->bone_a] += f;
            if (s->bone_b != 0) out[s->chain_b][s->bone_b] -= f;
        } else if (const auto* d = std::get_if<RelativeDampingForce>(&spec)) {
            for (std::size_t c = 0; c < chains.size(); ++c)
                for (std::size_t i = 1; i < chains[c].bone_count(); ++i)
                    out[c][i] += (chains[c].bone(i - 1).velocity - chains[c].bone(i).velocity) *
                                 d->coefficient;
        }
        // RestAngleForce: rejected at config validation, nothing to evaluate.
    }
}

KinematicDriver::KinematicDriver(std::vector<DriverKey> keys) : keys_(std::move(keys)) {
    tangents_.resize(keys_.size());
    if (keys_.size() < 2) return;
    for (std::size_t k = 0; k < keys_.size(); ++k) {
        const std::size_t a = (k == 0) ? 0 : k - 1;
        const std::size_t b = (k + 1 == keys_.size()) ? k : k + 1;
        const double span = keys_[b].t - keys_[a].t;
        tangents_[k] = (span > 0.0) ? (keys_[b].position - keys_[a].position) / span : Vec3{};
    }
}

Vec3 KinematicDriver::position(double t) const {
    if (keys_.empty()) return {};
    if (keys_.size() == 1 || t <= keys_.front().t) return keys_.front().position;
    if (t >= keys_.back().t) return keys_.back().position;

    std::size_t hi = 1;
    while (keys_[hi].t < t) ++hi;
    const DriverKey& a = keys_[hi - 1];
    const DriverKey& b = keys_[hi];
    const double h = b.t - a.t;
    const double u = (t - a.t) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    // Cubic Hermite basis.
    return a.position * (2 * u3 - 3 * u2 + 1) + tangents_[hi - 1] * (h * (u3 - 2 * u2 + u)) +
           b.position * (-2 * u3 + 3 * u2) + tangents_[hi] * (h * (u3 - u2));
}

DriverSample KinematicDriver::sample(double t, double dt) const {
    assert(dt > 0.0);
    const Vec3 x = position(t);
    const Vec3 xp = position(t + dt);
    const Vec3 xm = position(t - dt);
    return {x, (xp - xm) / (2.0 * dt), (xp - x * 2.0 + xm) / (dt * dt)};
}

}  // namespace ropecloth
