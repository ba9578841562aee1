#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ropecloth/dataset.hpp"
#include "ropecloth/spring_mesh.hpp"

using namespace ropecloth;

TEST_CASE("spring forces: rest length is force free, stretch follows Hooke") {
    SpringMesh mesh;
    mesh.positions = {{0, 0, 0}, {1, 0, 0}};
    mesh.velocities = {{}, {}};
    mesh.masses = {0.1, 0.1};
    mesh.springs = {{0, 1, 5.0, 1.0, 0.0}};
    std::vector<Vec3> f;
    mesh.accumulate_forces({}, f);
    CHECK(f[0].norm() == 0.0);
    CHECK(f[1].norm() == 0.0);

    mesh.positions[1].x = 1.25;  // stretched by delta
    mesh.accumulate_forces({}, f);
    CHECK(f[1].x == doctest::Approx(-5.0 * 0.25).epsilon(1e-12));
    CHECK((f[0] + f[1]).norm() == 0.0);  // equal and opposite
}

TEST_CASE("spring statics: hanging two-vertex chain extension") {
    // Vertex 1 hangs below a pinned vertex 0 on one spring: extension = w/k.
    const double k = 40.0, m = 0.02, g = 9.81;
    SpringMesh mesh;
    mesh.positions = {{0, 0, 0}, {0, -0.5, 0}};
    mesh.velocities = {{}, {}};
    mesh.masses = {m, m};
    mesh.springs = {{0, 1, k, 0.5, 0.15}};
    mesh.pinned = {0};
    mesh.pinned_rest = {{0, 0, 0}};
    mesh.air_drag = 1e-3;
    KinematicDriver still({{0.0, {0, 0, 0}}});
    const double dt = mesh.suggested_dt();
    for (int s = 0; s < static_cast<int>(20.0 / dt); ++s)
        step_mass_spring(mesh, dt, s * dt, {0, -g, 0}, still, {}, {}, {});
    const double extension = -0.5 - mesh.positions[1].y;
    CHECK(extension == doctest::Approx(m * g / k).epsilon(1e-6));
}

TEST_CASE("spring mesh: free mesh conserves momentum to roundoff") {
    SpringMesh mesh;
    mesh.positions = {{0, 0, 0}, {0.8, 0.1, 0}, {0.3, 0.9, -0.2}};
    mesh.velocities = {{0.2, 0, 0}, {-0.1, 0.3, 0}, {0, 0, 0.1}};
    mesh.masses = {0.1, 0.2, 0.3};
    mesh.springs = {{0, 1, 30, 0.5, 0.05}, {1, 2, 30, 0.5, 0.05}, {0, 2, 30, 0.5, 0.05}};
    KinematicDriver still({{0.0, {0, 0, 0}}});
    auto momentum = [&] {
        Vec3 p;
        for (std::size_t i = 0; i < 3; ++i) p += mesh.velocities[i] * mesh.masses[i];
        return p;
    };
    const Vec3 p0 = momentum();
    for (int s = 0; s < 100; ++s)
        step_mass_spring(mesh, 1e-3, s * 1e-3, {}, still, {}, {}, {});
    CHECK((momentum() - p0).norm() < 1e-12);
}

TEST_CASE("dataset split: exact 80/10/10 by frame index") {
    int counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < 10; ++i) ++counts[static_cast<int>(split_for_frame(i))];
    CHECK(counts[0] == 8);
    CHECK(counts[1] == 1);
    CHECK(counts[2] == 1);
    counts[0] = counts[1] = counts[2] = 0;
    for (std::size_t i = 0; i < 600; ++i) ++counts[static_cast<int>(split_for_frame(i))];
    CHECK(counts[0] == 480);
    CHECK(counts[1] == 60);
    CHECK(counts[2] == 60);
}

TEST_CASE("dataset: embedded pinned bone follows the driver exactly") {
    DataGenParams params;
    params.patch.nx = 8;
    params.patch.ny = 8;
    params.bone_columns = {2, 5};
    params.bone_rows = {0, 3, 6};
    params.frames = 20;
    const Dataset dataset = generate_dataset(params);
    const KinematicDriver driver = dataset_driver(params);

    // Bone 0 is embedded at a pinned top-row vertex.
    REQUIRE(dataset.frames.size() == 20);
    for (const DatasetFrame& f : dataset.frames) {
        const Vec3 expected = dataset.rest_bones[0] + driver.position(f.time);
        CHECK((f.bones[0] - expected).norm() < 1e-12);
        // Barycentric reconstruction is the definition of the bone position.
        const auto& e = dataset.embeddings[0];
        const auto& tri = dataset.faces[e.triangle];
        const Vec3 direct = f.vertices[tri[0]] * e.bary[0] + f.vertices[tri[1]] * e.bary[1] +
                            f.vertices[tri[2]] * e.bary[2];
        CHECK((f.bones[0] - direct).norm() == 0.0);
    }
}

TEST_CASE("dataset: binary round trip is byte identical") {
    DataGenParams params;
    params.patch.nx = 6;
    params.patch.ny = 6;
    params.bone_columns = {1, 4};
    params.bone_rows = {0, 2, 5};
    params.frames = 12;
    const Dataset dataset = generate_dataset(params);

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ropecloth_test_io";
    fs::create_directories(dir);
    const fs::path a = dir / "a.bin";
    const fs::path b = dir / "b.bin";
    write_dataset(a, dataset);
    const Dataset reread = read_dataset(a);
    write_dataset(b, reread);

    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
    CHECK(sa.size() > 100);
    CHECK(reread.frames.size() == dataset.frames.size());
    CHECK(reread.rest_vertices.size() == dataset.rest_vertices.size());
}

TEST_CASE("flag experiment: locking and overstretch bracket the rope chains") {
    const std::vector<double> ks{5.0, 320.0};
    const auto r = run_flag_experiment(ks);
    CHECK(r.rope_extent <= r.rope_total_length * (1.0 + 1e-9));
    CHECK(r.rope_extent == doctest::Approx(r.rope_total_length).epsilon(1e-3));
    CHECK(r.extent[1] < r.rope_extent);   // stiff: locking
    CHECK(r.extent[0] > r.rope_extent);   // weak: overstretch
}
