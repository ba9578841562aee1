#include "ropecloth/rope_chain.hpp"

#include <cassert>

namespace ropecloth {

RopeChain::RopeChain(std::vector<VirtualBone> bones, std::vector<double> max_lengths)
    : bones_(std::move(bones)), max_lengths_(std::move(max_lengths)) {
    assert(bones_.size() == max_lengths_.size() + 1);
    cached_dirs_.assign(max_lengths_.size(), world_up());
    cache_valid_.assign(max_lengths_.size(), false);
    // Seed the cache from the initial pose where possible.
    for (std::size_t i = 1; i <= max_lengths_.size(); ++i) segment_dir_len(i);
}

std::pair<Vec3, double> RopeChain::segment_dir_len(std::size_t segment) const {
    assert(segment >= 1 && segment <= max_lengths_.size());
    const Vec3 d = bones_[segment].position - bones_[segment - 1].position;
    const double len = d.norm();
    if (len < 1e-12) {
        if (!cache_valid_[segment - 1]) used_direction_fallback_ = true;
        return {cached_dirs_[segment - 1], len};
    }
    cached_dirs_[segment - 1] = d / len;
    cache_valid_[segment - 1] = true;
    return {cached_dirs_[segment - 1], len};
}

}  // namespace ropecloth
