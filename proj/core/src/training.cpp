#include "ropecloth/training.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>
#include <random>

#include "ropecloth/errors.hpp"
#include "ropecloth/io_util.hpp"

namespace ropecloth {

std::vector<double> nonrigid_displacement(std::span<const Vec3> positions,
                                          std::span<const Vec3> rest,
                                          const RigidPose& frame) {
    assert(positions.size() == rest.size());
    std::vector<double> d(3 * positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Vec3 local = frame.invert(positions[i]) - rest[i];
        d[3 * i + 0] = local.x;
        d[3 * i + 1] = local.y;
        d[3 * i + 2] = local.z;
    }
    return d;
}

double pinn_collision_loss(std::span<const Vec3> predicted_world,
                           std::span<const Vec3> truth_world, const AnalyticSdf& sdf,
                           const RigidPose& body_pose, double epsilon,
                           std::span<Vec3> grad_world, int* interpenetration_count) {
    assert(predicted_world.size() == truth_world.size());
    double loss = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < predicted_world.size(); ++i) {
        const Vec3& x = predicted_world[i];
        const double phi = sdf.phi(body_pose.invert(x));
        if (phi >= 0.0) continue;
        ++count;
        Vec3 dir = truth_world[i] - x;
        if (dir.norm2() > 1e-24) {
            dir = dir / dir.norm();
        } else {
            dir = body_pose.rotation * sdf.grad_phi(body_pose.invert(x));
        }
        // target = x + (|phi| + eps) * dir, treated as a constant.
        const double step = std::abs(phi) + epsilon;
        loss += step * step;
        if (!grad_world.empty()) grad_world[i] += dir * (-2.0 * step);
    }
    if (interpenetration_count) *interpenetration_count += count;
    return loss;
}

std::vector<std::vector<double>> mesh_displacements(const Dataset& dataset) {
    std::vector<std::vector<double>> out;
    out.reserve(dataset.frames.size());
    for (const DatasetFrame& f : dataset.frames)
        out.push_back(nonrigid_displacement(f.vertices, dataset.rest_vertices, f.root_frame));
    return out;
}

std::vector<std::vector<double>> bone_displacements(const Dataset& dataset) {
    std::vector<std::vector<double>> out;
    out.reserve(dataset.frames.size());
    for (const DatasetFrame& f : dataset.frames)
        out.push_back(nonrigid_displacement(f.bones, dataset.rest_bones, f.root_frame));
    return out;
}

namespace {

// Deterministic Fisher-Yates; std::shuffle is implementation-defined.
void shuffle_indices(std::vector<std::size_t>& idx, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

struct ParamView {
    std::vector<double> flat;

    static ParamView gather(const Mlp2& net) {
        ParamView v;
        v.flat.reserve(net.parameter_count());
        const auto blocks = net.parameter_blocks();
        const auto sizes = net.block_sizes();
        for (std::size_t b = 0; b < blocks.size(); ++b)
            v.flat.insert(v.flat.end(), blocks[b], blocks[b] + sizes[b]);
        return v;
    }

    void scatter(Mlp2& net) const {
        auto blocks = net.parameter_blocks();
        const auto sizes = net.block_sizes();
        std::size_t off = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            std::copy(flat.begin() + off, flat.begin() + off + sizes[b], blocks[b]);
            off += sizes[b];
        }
    }
};

std::vector<double> gather_grads(const MlpGrads& g) {
    std::vector<double> flat;
    flat.reserve(g.w1.size() + g.b1.size() + g.w2.size() + g.b2.size() + g.w3.size() +
                 g.b3.size());
    for (const auto* v : {&g.w1, &g.b1, &g.w2, &g.b2, &g.w3, &g.b3})
        flat.insert(flat.end(), v->begin(), v->end());
    return flat;
}

}  // namespace

TrainedStage train_stage(const Dataset& dataset, PcaModel pca,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<std::vector<double>>& targets,
                         const std::vector<std::vector<double>>& base,
                         const TrainConfig& config) {
    const std::size_t n_frames = dataset.frames.size();
    assert(inputs.size() == n_frames && targets.size() == n_frames && base.size() == n_frames);
    const std::size_t in_dim = inputs.empty() ? 0 : inputs[0].size();
    const std::size_t k = pca.components;
    const std::size_t n_vertices = dataset.vertex_count();

    TrainedStage stage;
    stage.net = Mlp2::init(in_dim, static_cast<std::size_t>(config.hidden_width), k,
                           config.seed);
    stage.pca = std::move(pca);

    const auto train_idx = dataset.frame_indices(Split::Train);
    const auto val_idx = dataset.frame_indices(Split::Validation);
    const AnalyticSdf sdf(dataset.body);
    const BodyMotion body_motion(dataset.body_motion);

    AdamOptimizer adam(stage.net.parameter_count(), config.beta1, config.beta2,
                       config.adam_epsilon);
    MlpWorkspace ws;
    MlpGrads grads = stage.net.make_grads();
    std::vector<double> recon(stage.pca.dim);
    std::vector<double> d_loss_d_recon(stage.pca.dim);
    std::vector<double> dy(k);
    std::vector<Vec3> world(n_vertices);
    std::vector<Vec3> grad_world(n_vertices);

    // Predicted world positions for frame f: rest + base + reconstruction,
    // carried through the frame's rigid pose.
    auto place_world = [&](std::size_t f, const std::vector<double>& rec) {
        const RigidPose& pose = dataset.frames[f].root_frame;
        for (std::size_t v = 0; v < n_vertices; ++v) {
            const Vec3 local{
                dataset.rest_vertices[v].x + base[f][3 * v + 0] + rec[3 * v + 0],
                dataset.rest_vertices[v].y + base[f][3 * v + 1] + rec[3 * v + 1],
                dataset.rest_vertices[v].z + base[f][3 * v + 2] + rec[3 * v + 2]};
            world[v] = pose.apply(local);
        }
    };

    auto evaluate_frame = [&](std::size_t f, bool with_grads, double& data_term,
                              double& pinn_term, int* interpen) {
        stage.net.forward(inputs[f], ws);
        pca_reconstruct(stage.pca, ws.y, recon);

        data_term = 0.0;
        for (std::size_t i = 0; i < recon.size(); ++i) {
            const double e = recon[i] - targets[f][i];
            data_term += e * e;
        }

        place_world(f, recon);
        std::fill(grad_world.begin(), grad_world.end(), Vec3{});
        const RigidPose body_pose = body_motion.pose(dataset.frames[f].time);
        pinn_term = pinn_collision_loss(world, dataset.frames[f].vertices, sdf, body_pose,
                                        config.collision_epsilon,
                                        with_grads ? std::span<Vec3>(grad_world)
                                                   : std::span<Vec3>{},
                                        interpen);
        if (!with_grads) return;

        // dL/d(reconstruction): data term plus PINN pulled back through the
        // rigid pose (rotation only; translation drops out).
        const RigidPose& pose = dataset.frames[f].root_frame;
        const Mat3 rot_t = pose.rotation.transposed();
        for (std::size_t i = 0; i < recon.size(); ++i)
            d_loss_d_recon[i] = config.data_weight * 2.0 * (recon[i] - targets[f][i]);
        for (std::size_t v = 0; v < n_vertices; ++v) {
            const Vec3 g = rot_t * grad_world[v] * config.pinn_weight;
            d_loss_d_recon[3 * v + 0] += g.x;
            d_loss_d_recon[3 * v + 1] += g.y;
            d_loss_d_recon[3 * v + 2] += g.z;
        }
        // dL/dc = basis^T dL/d(reconstruction)
        for (std::size_t j = 0; j < k; ++j) {
            const double* col = stage.pca.basis.data() + j * stage.pca.dim;
            double s = 0.0;
            for (std::size_t i = 0; i < stage.pca.dim; ++i) s += col[i] * d_loss_d_recon[i];
            dy[j] = s;
        }
        stage.net.backward(inputs[f], ws, dy, grads);
    };

    auto validate = [&](double& rmse, int& interpen) {
        double sq = 0.0;
        std::size_t count = 0;
        interpen = 0;
        for (std::size_t f : val_idx) {
            double data = 0.0, pinn = 0.0;
            evaluate_frame(f, false, data, pinn, &interpen);
            sq += data;
            count += stage.pca.dim;
        }
        rmse = count ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
    };

    ParamView best = ParamView::gather(stage.net);
    stage.best_val_rmse = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(train_idx);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = cosine_annealed_lr(config.learning_rate, epoch, config.epochs);
        order = train_idx;
        shuffle_indices(order, config.seed * 0x9e3779b97f4a7c15ull + epoch);

        double epoch_data = 0.0, epoch_pinn = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            grads.zero();
            for (std::size_t b = start; b < stop; ++b) {
                double data = 0.0, pinn = 0.0;
                evaluate_frame(order[b], true, data, pinn, nullptr);
                epoch_data += data;
                epoch_pinn += pinn;
            }
            std::vector<double> flat = gather_grads(grads);
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (double& g : flat) g *= inv;
            ParamView params = ParamView::gather(stage.net);
            adam.step(params.flat, flat, lr);
            params.scatter(stage.net);
        }

        TrainLogRow row;
        row.epoch = epoch;
        row.lr = lr;
        row.data_loss = order.empty() ? 0.0 : epoch_data / static_cast<double>(order.size());
        row.pinn_loss = order.empty() ? 0.0 : epoch_pinn / static_cast<double>(order.size());
        if (!std::isfinite(row.data_loss) || !std::isfinite(row.pinn_loss))
            throw InvariantError("training diverged (non-finite loss) at epoch " +
                                 std::to_string(epoch));
        validate(row.val_rmse, row.val_interpenetrations);
        stage.log.push_back(row);

        if (row.val_rmse < stage.best_val_rmse) {
            stage.best_val_rmse = row.val_rmse;
            stage.best_epoch = epoch;
            best = ParamView::gather(stage.net);
        }
    }
    if (config.epochs > 0) best.scatter(stage.net);
    if (!std::isfinite(stage.best_val_rmse)) {
        double rmse;
        int interpen;
        validate(rmse, interpen);
        stage.best_val_rmse = rmse;
    }
    return stage;
}

TrainedStage train_skinning(const Dataset& dataset, const TrainConfig& config) {
    const auto targets = mesh_displacements(dataset);
    const auto inputs = bone_displacements(dataset);
    std::vector<std::vector<double>> train_samples;
    for (std::size_t f : dataset.frame_indices(Split::Train))
        train_samples.push_back(targets[f]);
    PcaModel pca = fit_pca(train_samples, config.pca_components);
    const std::vector<std::vector<double>> base(
        dataset.frames.size(), std::vector<double>(3 * dataset.vertex_count(), 0.0));
    return train_stage(dataset, std::move(pca), inputs, targets, base, config);
}

TrainedStage train_shape(const Dataset& dataset, const TrainedStage& skinning,
                         const TrainConfig& config) {
    const auto gt = mesh_displacements(dataset);
    const auto inputs = bone_displacements(dataset);

    // Frozen skinning pass over every frame.
    std::vector<std::vector<double>> base(dataset.frames.size());
    MlpWorkspace ws;
    for (std::size_t f = 0; f < dataset.frames.size(); ++f) {
        skinning.net.forward(inputs[f], ws);
        base[f].resize(skinning.pca.dim);
        pca_reconstruct(skinning.pca, ws.y, base[f]);
    }

    std::vector<std::vector<double>> residuals(dataset.frames.size());
    for (std::size_t f = 0; f < dataset.frames.size(); ++f) {
        residuals[f].resize(gt[f].size());
        for (std::size_t i = 0; i < gt[f].size(); ++i)
            residuals[f][i] = gt[f][i] - base[f][i];
    }
    std::vector<std::vector<double>> train_samples;
    for (std::size_t f : dataset.frame_indices(Split::Train))
        train_samples.push_back(residuals[f]);
    PcaModel pca = fit_pca(train_samples, config.pca_components);
    return train_stage(dataset, std::move(pca), inputs, residuals, base, config);
}

void write_training_log_csv(std::ostream& os, const std::vector<TrainLogRow>& log) {
    os << "epoch,lr,data_loss,pinn_loss,val_rmse,val_interpenetrations\n";
    for (const TrainLogRow& r : log) {
        os << r.epoch << ',' << format_double(r.lr) << ',' << format_double(r.data_loss)
           << ',' << format_double(r.pinn_loss) << ',' << format_double(r.val_rmse) << ','
           << r.val_interpenetrations << '\n';
    }
}

}  // namespace ropecloth
