#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ropecloth/dataset.hpp"
#include "ropecloth/mlp.hpp"
#include "ropecloth/pca.hpp"

namespace ropecloth {

struct TrainConfig {
    double data_weight = 0.1;
    double pinn_weight = 1000.0;
    double learning_rate = 1e-4;  // 1e-5 for the shape stage
    int epochs = 300;
    int batch_size = 32;
    double collision_epsilon = 2e-3;  // SDF expansion during training
    int hidden_width = 64;
    std::size_t pca_components = 16;
    std::uint64_t seed = 1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
};

/// d_i = R^T (x_i - t) - rest_i, flattened to 3N.
std::vector<double> nonrigid_displacement(std::span<const Vec3> positions,
                                          std::span<const Vec3> rest,
                                          const RigidPose& frame);

/// PINN-style collision loss over one frame of predicted world vertices.
/// Each interpenetrating vertex is pulled toward a detached target on the
/// push-out ray aimed at its ground-truth position: target = x + (|phi|+eps) r,
/// loss += |x - target|^2, so the gradient 2 (x - target) is parallel to the
/// vertex's data-term gradient. A vertex coincident with its ground truth
/// falls back to the SDF gradient direction. Gradients accumulate into
/// grad_world.
double pinn_collision_loss(std::span<const Vec3> predicted_world,
                           std::span<const Vec3> truth_world, const AnalyticSdf& sdf,
                           const RigidPose& body_pose, double epsilon,
                           std::span<Vec3> grad_world,
                           int* interpenetration_count = nullptr);

struct TrainLogRow {
    int epoch = 0;
    double lr = 0.0;
    double data_loss = 0.0;   // epoch mean of the per-frame L2^2 data term
    double pinn_loss = 0.0;   // epoch mean of the per-frame PINN term
    double val_rmse = 0.0;    // per-component RMSE on validation frames, m
    int val_interpenetrations = 0;
};

struct TrainedStage {
    Mlp2 net;
    PcaModel pca;  // the PCA this stage's coefficients live in
    double best_val_rmse = 0.0;
    int best_epoch = -1;
    std::vector<TrainLogRow> log;
};

/// Stage-agnostic trainer: maps per-frame inputs (bone nonrigid
/// displacements) to PCA coefficients of per-frame targets, with the PINN
/// loss evaluated on base + reconstruction placed into world space.
/// base is the per-frame displacement the reconstruction sits on top of
/// (zero for skinning, the frozen skinned displacement for the shape stage).
TrainedStage train_stage(const Dataset& dataset, PcaModel pca,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<std::vector<double>>& targets,
                         const std::vector<std::vector<double>>& base,
                         const TrainConfig& config);

/// Mesh nonrigid displacement of every frame, the skinning PCA training set.
std::vector<std::vector<double>> mesh_displacements(const Dataset& dataset);
/// Bone nonrigid displacement of every frame, the network inputs.
std::vector<std::vector<double>> bone_displacements(const Dataset& dataset);

/// Skinning stage: fits the PCA on training frames and trains the net.
TrainedStage train_skinning(const Dataset& dataset, const TrainConfig& config);

/// Shape stage: runs the frozen skinning stage over the dataset, fits the
/// residual PCA, and trains the second net on the residual coefficients.
TrainedStage train_shape(const Dataset& dataset, const TrainedStage& skinning,
                         const TrainConfig& config);

void write_training_log_csv(std::ostream& os, const std::vector<TrainLogRow>& log);

}  // namespace ropecloth
