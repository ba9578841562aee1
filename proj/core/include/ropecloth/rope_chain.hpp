#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ropecloth/geometry.hpp"

namespace ropecloth {

/// A simulated point mass acting as a skinning control. Bone 0 of a chain is
/// the kinematic root: its mass field is ignored (treated as infinite) and it
/// only moves through its driver.
struct VirtualBone {
    Vec3 position;
    Vec3 velocity;
    double mass = 1.0;  // kg, > 0 for non-kinematic bones
};

/// Root-to-tip chain of virtual bones. Segment i (1-based, 1..m) connects
/// bone i-1 to bone i and may shrink freely but never exceed max_length(i).
class RopeChain {
  public:
    RopeChain() = default;
    RopeChain(std::vector<VirtualBone> bones, std::vector<double> max_lengths);

    std::size_t bone_count() const { return bones_.size(); }
    std::size_t segment_count() const { return max_lengths_.size(); }

    VirtualBone& bone(std::size_t i) { return bones_[i]; }
    const VirtualBone& bone(std::size_t i) const { return bones_[i]; }
    double max_length(std::size_t segment) const { return max_lengths_[segment - 1]; }

    std::vector<VirtualBone>& bones() { return bones_; }
    const std::vector<VirtualBone>& bones() const { return bones_; }
    const std::vector<double>& max_lengths() const { return max_lengths_; }

    /// (unit direction, length) of segment i. Degenerate segments
    /// (length < 1e-12 m) reuse the last cached direction so that l_hat stays
    /// continuous; a never-initialized cache falls back to world_up().
    std::pair<Vec3, double> segment_dir_len(std::size_t segment) const;

    bool used_direction_fallback() const { return used_direction_fallback_; }
    void clear_diagnostics() { used_direction_fallback_ = false; }

  private:
    std::vector<VirtualBone> bones_;
    std::vector<double> max_lengths_;
    // Per-segment direction cache for degenerate (zero-length) segments.
    mutable std::vector<Vec3> cached_dirs_;
    mutable std::vector<bool> cache_valid_;
    mutable bool used_direction_fallback_ = false;
};

}  // namespace ropecloth
