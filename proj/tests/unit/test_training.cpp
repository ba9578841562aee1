#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ropecloth/errors.hpp"
#include "ropecloth/skinning_model.hpp"
#include "ropecloth/training.hpp"

using namespace ropecloth;

namespace {

// Small dataset shared by the training tests (8x8 patch, 60 frames).
const Dataset& tiny_dataset() {
    static const Dataset dataset = [] {
        DataGenParams params;
        params.patch.nx = 8;
        params.patch.ny = 8;
        params.patch.structural_stiffness = 40;
        params.patch.shear_stiffness = 20;
        params.bone_columns = {1, 4, 6};
        params.bone_rows = {0, 2, 4, 6};
        params.frames = 60;
        params.frame_dt = 1.0 / 40.0;
        params.body = SphereSdf{{0.0, -0.28, -0.10}, 0.1};
        return generate_dataset(params);
    }();
    return dataset;
}

TrainConfig tiny_config() {
    TrainConfig config;
    config.epochs = 120;
    config.hidden_width = 24;
    config.pca_components = 8;
    config.batch_size = 16;
    config.learning_rate = 3e-4;
    return config;
}

}  // namespace

TEST_CASE("nonrigid_displacement: identity, rigid removal, translation") {
    const std::vector<Vec3> rest{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    CHECK(nonrigid_displacement(rest, rest, RigidPose{}) ==
          std::vector<double>(9, 0.0));

    RigidPose pose{Mat3::axis_angle({0, 0, 1}, 0.6), {0.3, -0.2, 0.9}};
    std::vector<Vec3> moved;
    for (const Vec3& r : rest) moved.push_back(pose.apply(r));
    for (double v : nonrigid_displacement(moved, rest, pose)) CHECK(std::abs(v) < 1e-12);

    std::vector<Vec3> lifted;
    for (const Vec3& r : rest) lifted.push_back(r + Vec3{0, 0, 1});
    const auto d = nonrigid_displacement(lifted, rest, RigidPose{});
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(d[i] == doctest::Approx(i % 3 == 2 ? 1.0 : 0.0));
}

TEST_CASE("pinn loss: clean frame contributes nothing") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 0.5}});
    std::vector<Vec3> pred{{1, 0, 0}, {0, 2, 0}};
    std::vector<Vec3> truth{{1, 0, 0}, {0, 2, 0}};
    std::vector<Vec3> grad(2);
    int count = 0;
    const double loss =
        pinn_collision_loss(pred, truth, sdf, RigidPose{}, 1e-3, grad, &count);
    CHECK(loss == 0.0);
    CHECK(count == 0);
    CHECK(grad[0].norm() == 0.0);
}

TEST_CASE("pinn loss: direct substitution at phi = -0.1") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    const Vec3 x{0.9, 0, 0};  // phi = -0.1
    const Vec3 truth = x + Vec3{1.0, 0, 0};
    std::vector<Vec3> grad(1);
    const double loss = pinn_collision_loss(std::vector<Vec3>{x}, std::vector<Vec3>{truth},
                                            sdf, RigidPose{}, 0.0, grad);
    CHECK(loss == doctest::Approx(0.01).epsilon(1e-12));
    // Gradient 2 (x - target) = -2 * 0.1 * x_hat.
    CHECK(grad[0].x == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("pinn loss: gradient is parallel to the data-term gradient") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    const Vec3 x{0.4, 0.6, -0.2};  // inside
    const Vec3 truth{1.4, 0.9, 0.3};
    std::vector<Vec3> grad(1);
    pinn_collision_loss(std::vector<Vec3>{x}, std::vector<Vec3>{truth}, sdf, RigidPose{},
                        1e-3, grad);
    const Vec3 data_grad = (x - truth) * 2.0;
    const double cosine =
        grad[0].dot(data_grad) / (grad[0].norm() * data_grad.norm());
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pinn loss: coincident ground truth falls back to the SDF gradient") {
    AnalyticSdf sdf({SphereSdf{{0, 0, 0}, 1.0}});
    const Vec3 x{0.5, 0, 0};
    std::vector<Vec3> grad(1);
    const double loss = pinn_collision_loss(std::vector<Vec3>{x}, std::vector<Vec3>{x}, sdf,
                                            RigidPose{}, 0.0, grad);
    CHECK(loss == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(grad[0].x < 0.0);  // pull outward along +x means gradient points -x
}

TEST_CASE("training: memorizes a single repeated frame") {
    Dataset dataset = tiny_dataset();
    // Repeat one frame everywhere so capacity is the only question.
    DatasetFrame f = dataset.frames[30];
    for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
        DatasetFrame copy = f;
        copy.split = split_for_frame(i);
        dataset.frames[i] = copy;
    }
    TrainConfig config = tiny_config();
    config.epochs = 400;
    config.learning_rate = 1e-3;
    config.pinn_weight = 0.0;  // pure data term for the capacity check
    const TrainedStage stage = train_skinning(dataset, config);
    CHECK(stage.log.back().data_loss < 1e-6);
}

TEST_CASE("training: deterministic given seed, epochs 0 returns the init") {
    const Dataset& dataset = tiny_dataset();
    TrainConfig config = tiny_config();
    config.epochs = 5;
    const TrainedStage a = train_skinning(dataset, config);
    const TrainedStage b = train_skinning(dataset, config);
    CHECK(a.net.w1 == b.net.w1);
    CHECK(a.net.b3 == b.net.b3);
    CHECK(a.log.back().val_rmse == b.log.back().val_rmse);

    config.epochs = 0;
    const TrainedStage init = train_skinning(dataset, config);
    const Mlp2 reference = Mlp2::init(init.net.in, init.net.hidden, init.net.out, config.seed);
    CHECK(init.net.w1 == reference.w1);
}

TEST_CASE("training: beats the predict-the-mean baseline on validation") {
    const Dataset& dataset = tiny_dataset();
    const TrainedStage stage = train_skinning(dataset, tiny_config());

    // Baseline: rest pose (zero displacement = PCA mean alone ~ mean predictor).
    const auto targets = mesh_displacements(dataset);
    double base_sq = 0.0;
    std::size_t n = 0;
    std::vector<double> mean_rec(stage.pca.dim);
    pca_reconstruct(stage.pca, std::vector<double>(stage.pca.components, 0.0), mean_rec);
    for (std::size_t f : dataset.frame_indices(Split::Validation)) {
        for (std::size_t i = 0; i < targets[f].size(); ++i) {
            const double e = targets[f][i] - mean_rec[i];
            base_sq += e * e;
        }
        n += targets[f].size();
    }
    const double baseline_rmse = std::sqrt(base_sq / n);
    CHECK(stage.best_val_rmse < baseline_rmse);
}

TEST_CASE("inference: zero nets produce the rigidly placed mean shape") {
    const Dataset& dataset = tiny_dataset();
    SkinningModel model = make_model_shell(dataset);
    TrainConfig config = tiny_config();
    config.epochs = 0;
    TrainedStage stage = train_skinning(dataset, config);
    model.skin_pca = stage.pca;
    model.skin_net = stage.net;
    std::fill(model.skin_net.w1.begin(), model.skin_net.w1.end(), 0.0);
    std::fill(model.skin_net.w3.begin(), model.skin_net.w3.end(), 0.0);
    std::fill(model.skin_net.b3.begin(), model.skin_net.b3.end(), 0.0);

    const RigidPose pose{Mat3::axis_angle({0, 1, 0}, 0.4), {0.2, 0.1, -0.3}};
    std::vector<Vec3> bones;
    for (const Vec3& r : model.rest_bones) bones.push_back(pose.apply(r));
    const auto mesh = infer_mesh(model, bones, pose, false);
    for (std::size_t v = 0; v < mesh.size(); ++v) {
        const Vec3 expected = pose.apply(
            model.rest_vertices[v] + Vec3{model.skin_pca.mean[3 * v + 0],
                                          model.skin_pca.mean[3 * v + 1],
                                          model.skin_pca.mean[3 * v + 2]});
        CHECK((mesh[v] - expected).norm() < 1e-12);
    }
}

TEST_CASE("inference: dimension mismatch is rejected") {
    const Dataset& dataset = tiny_dataset();
    SkinningModel model = make_model_shell(dataset);
    TrainConfig config = tiny_config();
    config.epochs = 0;
    TrainedStage stage = train_skinning(dataset, config);
    model.skin_pca = stage.pca;
    model.skin_net = stage.net;
    CHECK_THROWS_AS(infer_mesh(model, std::vector<Vec3>(3), RigidPose{}),
                    ConfigError);
}

TEST_CASE("model file: round trip is byte identical") {
    const Dataset& dataset = tiny_dataset();
    SkinningModel model = make_model_shell(dataset);
    TrainConfig config = tiny_config();
    config.epochs = 2;
    TrainedStage skin = train_skinning(dataset, config);
    model.skin_pca = skin.pca;
    model.skin_net = skin.net;
    config.learning_rate = 1e-5;
    TrainedStage shape = train_shape(dataset, skin, config);
    model.has_shape = true;
    model.shape_pca = shape.pca;
    model.shape_net = shape.net;

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ropecloth_test_io";
    fs::create_directories(dir);
    write_model(dir / "m1.bin", model);
    const SkinningModel reread = read_model(dir / "m1.bin");
    write_model(dir / "m2.bin", reread);
    std::ifstream fa(dir / "m1.bin", std::ios::binary), fb(dir / "m2.bin", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
    CHECK(reread.has_shape);
    CHECK(reread.skin_net.w1 == model.skin_net.w1);
}
