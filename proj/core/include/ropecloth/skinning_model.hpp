#pragma once

#include <filesystem>
#include <optional>

#include "ropecloth/training.hpp"

namespace ropecloth {

/// Everything inference needs in one file: rest state, mesh topology, bone
/// layout, the skinning PCA + net, and optionally the shape PCA + net.
struct SkinningModel {
    std::vector<Vec3> rest_vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<Vec3> rest_bones;
    std::vector<std::uint8_t> bone_simulated;  // per bone
    std::vector<SdfPrimitive> body;            // carried along for reporting
    PcaModel skin_pca;
    Mlp2 skin_net;
    bool has_shape = false;
    PcaModel shape_pca;
    Mlp2 shape_net;

    std::size_t simulated_bone_count() const;
};

SkinningModel make_model_shell(const Dataset& dataset);

void write_model(const std::filesystem::path& path, const SkinningModel& model);
SkinningModel read_model(const std::filesystem::path& path);

/// Full bone list from the simulated bones (in model order) plus the
/// unattached bones transported rigidly by the root frame.
std::vector<Vec3> assemble_bones(const SkinningModel& model,
                                 std::span<const Vec3> simulated_world,
                                 const RigidPose& frame);

/// Bone world positions -> skinned mesh (+ optional shape residual), placed
/// back into world space by the rigid frame.
std::vector<Vec3> infer_mesh(const SkinningModel& model, std::span<const Vec3> bone_world,
                             const RigidPose& frame, bool use_shape = true);

/// Minimal OBJ mesh IO ("v" and 1-based "f" lines, %.17g doubles).
void write_obj(std::ostream& os, std::span<const Vec3> vertices,
               std::span<const std::array<std::uint32_t, 3>> faces);
void read_obj(std::istream& is, std::vector<Vec3>& vertices,
              std::vector<std::array<std::uint32_t, 3>>& faces);

}  // namespace ropecloth
