#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ropecloth/engine.hpp"
#include "ropecloth/spring_mesh.hpp"

namespace ropecloth {

/// Where a virtual bone lives in the rest mesh: host triangle plus
/// barycentric weights (non-negative, summing to one). Bones flagged
/// simulated come from rope-chain simulation at inference time; unattached
/// ones ride rigidly with the root frame.
struct BoneEmbedding {
    std::uint32_t triangle = 0;
    std::array<double, 3> bary{1.0, 0.0, 0.0};
    bool simulated = true;
};

enum class Split : std::uint8_t { Train = 0, Validation = 1, Holdout = 2 };

/// Deterministic 80/10/10 split by frame index: index mod 10 maps 0-7 to
/// train, 8 to validation, 9 to holdout (so 10 frames split exactly 8/1/1).
Split split_for_frame(std::size_t frame_index);

struct DatasetFrame {
    double time = 0.0;
    RigidPose root_frame;  // pose of the key body part (the driver, here)
    Split split = Split::Train;
    std::vector<Vec3> vertices;
    std::vector<Vec3> bones;
};

struct Dataset {
    std::vector<Vec3> rest_vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<Vec3> rest_bones;
    std::vector<BoneEmbedding> embeddings;
    std::vector<SdfPrimitive> body;      // collision primitives (body-local frame)
    std::vector<MotionKey> body_motion;  // rigid trajectory of those primitives
    double frame_dt = 0.0;
    std::vector<DatasetFrame> frames;

    std::size_t vertex_count() const { return rest_vertices.size(); }
    std::size_t bone_count() const { return rest_bones.size(); }
    std::vector<std::size_t> frame_indices(Split split) const;
};

struct DataGenParams {
    PatchParams patch;                      // 20x20 desk patch by default
    std::vector<int> bone_columns{2, 7, 12, 17};
    std::vector<int> bone_rows{0, 3, 6, 9, 12, 15, 18};  // row 0 becomes the root
    bool corner_bones = true;               // unattached trackers at the top corners
    int frames = 600;
    double frame_dt = 1.0 / 120.0;           // recording cadence; substeps adapt
    std::uint64_t seed = 1;                  // jitters the sway path
    double sway_amplitude = 0.16;            // m, sideways
    SdfPrimitive body = SphereSdf{{0.0, -0.30, -0.13}, 0.12};
};

/// Runs the mass-spring patch under a seeded sway driver and records vertex
/// and embedded-bone positions every frame. Collisions use the conventional
/// gradient policy.
Dataset generate_dataset(const DataGenParams& params);

/// Driver path used by generate_dataset for a given seed (shared with the
/// matching rope-chain scene).
KinematicDriver dataset_driver(const DataGenParams& params);

/// Matching rope-chain scene: chains down the bone columns, same driver and
/// body, history collision policy. Inference input comes from simulating it.
Scene rope_scene_for_dataset(const DataGenParams& params);

void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& os, const Dataset& dataset);

}  // namespace ropecloth
