#include "ropecloth/dataset.hpp"

#include <cassert>
#include <cmath>
#include <ostream>
#include <random>

#include "ropecloth/io_util.hpp"

namespace ropecloth {

Split split_for_frame(std::size_t frame_index) {
    const std::size_t slot = frame_index % 10;
    if (slot < 8) return Split::Train;
    return slot == 8 ? Split::Validation : Split::Holdout;
}

std::vector<std::size_t> Dataset::frame_indices(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (frames[i].split == split) out.push_back(i);
    return out;
}

namespace {

// A triangle incident to grid vertex (r, c), with the vertex first so the
// barycentric weight vector is (1, 0, 0).
std::uint32_t host_triangle_for_vertex(const Patch& patch, int r, int c) {
    const int cell_r = (r + 1 < patch.ny) ? r : r - 1;
    const int cell_c = (c + 1 < patch.nx) ? c : c - 1;
    const std::uint32_t base = 2 * (cell_r * (patch.nx - 1) + cell_c);
    // Cell triangles: [v(r,c), v(r+1,c), v(r,c+1)] and
    //                 [v(r,c+1), v(r+1,c), v(r+1,c+1)].
    const std::uint32_t v = patch.vertex_id(r, c);
    const auto& faces_pair = std::array<std::uint32_t, 2>{base, base + 1};
    (void)v;
    return (r == cell_r && c == cell_c) ? faces_pair[0] : faces_pair[1];
}

std::array<double, 3> bary_for_vertex(const Patch& patch,
                                      const std::vector<std::array<std::uint32_t, 3>>& faces,
                                      std::uint32_t tri, std::uint32_t vertex) {
    std::array<double, 3> b{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i)
        if (faces[tri][i] == vertex) b[i] = 1.0;
    return b;
}

Vec3 embedded_position(const Dataset& dataset, const std::vector<Vec3>& vertices,
                       const BoneEmbedding& e) {
    const auto& f = dataset.faces[e.triangle];
    return vertices[f[0]] * e.bary[0] + vertices[f[1]] * e.bary[1] +
           vertices[f[2]] * e.bary[2];
}

}  // namespace

KinematicDriver dataset_driver(const DataGenParams& params) {
    // Smooth sway: keys every half second with seeded amplitude jitter.
    std::mt19937_64 rng(params.seed);
    auto jitter = [&](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    const double total_time = params.frames * params.frame_dt;
    const double ax = params.sway_amplitude * jitter(0.8, 1.2);
    const double az = 0.6 * params.sway_amplitude * jitter(0.8, 1.2);
    const double fx = jitter(0.25, 0.4);   // Hz
    const double fz = jitter(0.35, 0.55);
    const double phase = jitter(0.0, 3.14);
    std::vector<DriverKey> keys;
    for (double t = 0.0; t <= total_time + 0.25; t += 0.25) {
        keys.push_back({t, {ax * std::sin(2 * M_PI * fx * t),
                            0.02 * std::sin(2 * M_PI * 0.7 * t + phase),
                            az * std::sin(2 * M_PI * fz * t + phase)}});
    }
    return KinematicDriver(keys);
}

Dataset generate_dataset(const DataGenParams& params) {
    Patch patch = build_patch(params.patch, {});  // top row pinned to the driver
    const KinematicDriver driver = dataset_driver(params);

    Dataset dataset;
    dataset.rest_vertices = patch.mesh.positions;
    dataset.faces = patch.faces;
    dataset.frame_dt = params.frame_dt;
    dataset.body = {params.body};

    for (int c : params.bone_columns) {
        for (int r : params.bone_rows) {
            const std::uint32_t v = patch.vertex_id(r, c);
            BoneEmbedding e;
            e.triangle = host_triangle_for_vertex(patch, r, c);
            e.bary = bary_for_vertex(patch, dataset.faces, e.triangle, v);
            e.simulated = true;
            dataset.embeddings.push_back(e);
            dataset.rest_bones.push_back(patch.mesh.positions[v]);
        }
    }
    if (params.corner_bones) {
        for (int c : {0, params.patch.nx - 1}) {
            const std::uint32_t v = patch.vertex_id(0, c);
            BoneEmbedding e;
            e.triangle = host_triangle_for_vertex(patch, 0, c);
            e.bary = bary_for_vertex(patch, dataset.faces, e.triangle, v);
            e.simulated = false;
            dataset.embeddings.push_back(e);
            dataset.rest_bones.push_back(patch.mesh.positions[v]);
        }
    }

    std::vector<AnalyticSdf> bodies{AnalyticSdf(dataset.body)};
    const BodyMotion body_motion{};  // static body at desk scale
    CollisionPolicy policy;          // conventional baseline for ground truth
    policy.pushout = PushoutDirection::Gradient;
    policy.normal = ProjectionNormal::Gradient;
    policy.epsilon = 2e-3;
    policy.pushout_iterations = 4;
    policy.friction = 0.3;

    const Vec3 gravity{0, -9.81, 0};
    const int substeps =
        static_cast<int>(std::ceil(params.frame_dt / patch.mesh.suggested_dt()));
    const double dt = params.frame_dt / substeps;

    double t = 0.0;
    for (int f = 0; f < params.frames; ++f) {
        for (int s = 0; s < substeps; ++s) {
            std::vector<MotionSample> samples{MotionSample::from(body_motion, t, t + dt)};
            step_mass_spring(patch.mesh, dt, t, gravity, driver, bodies, samples, policy);
            t += dt;
        }
        DatasetFrame frame;
        frame.time = t;
        frame.split = split_for_frame(static_cast<std::size_t>(f));
        frame.root_frame = {Mat3::identity(), driver.position(t)};
        frame.vertices = patch.mesh.positions;
        frame.bones.reserve(dataset.embeddings.size());
        for (const BoneEmbedding& e : dataset.embeddings)
            frame.bones.push_back(embedded_position(dataset, frame.vertices, e));
        dataset.frames.push_back(std::move(frame));
    }
    return dataset;
}

Scene rope_scene_for_dataset(const DataGenParams& params) {
    Patch patch = build_patch(params.patch, {});
    Scene scene;
    scene.dt = 1.0 / 600.0;
    scene.frames = 0;  // caller decides
    scene.solver = SolverPolicy::tolerance(1e-6);
    scene.collision.pushout = PushoutDirection::History;
    scene.collision.normal = ProjectionNormal::History;
    scene.collision.epsilon = 2e-3;
    scene.collision.pushout_iterations = 4;
    scene.collision.friction = 0.3;
    scene.forces = {GravityForce{{0, -9.81, 0}}, RelativeDampingForce{0.004},
                    WindForce{1.5e-3, {}}};
    scene.drivers = {dataset_driver(params)};
    scene.bodies.push_back({AnalyticSdf({params.body}), BodyMotion{}});

    const double dy = params.patch.height / (params.patch.ny - 1);
    const double bone_mass =
        params.patch.total_mass /
        static_cast<double>(params.bone_columns.size() * params.bone_rows.size());
    for (std::size_t ci = 0; ci < params.bone_columns.size(); ++ci) {
        const int c = params.bone_columns[ci];
        std::vector<VirtualBone> bones;
        std::vector<double> lens;
        int prev_row = params.bone_rows.front();
        for (std::size_t ri = 0; ri < params.bone_rows.size(); ++ri) {
            const int r = params.bone_rows[ri];
            const Vec3 rest = patch.mesh.positions[patch.vertex_id(r, c)];
            bones.push_back({rest, {}, ri == 0 ? 0.0 : bone_mass});
            if (ri > 0) lens.push_back((r - prev_row) * dy);
            prev_row = r;
        }
        scene.chains.emplace_back(std::move(bones), std::move(lens));
        scene.chain_driver.push_back(0);
    }
    // Weak lateral springs couple neighboring chains level by level.
    for (std::size_t ci = 0; ci + 1 < params.bone_columns.size(); ++ci) {
        const double dx_cols =
            (params.bone_columns[ci + 1] - params.bone_columns[ci]) *
            (params.patch.width / (params.patch.nx - 1));
        for (std::size_t ri = 1; ri < params.bone_rows.size(); ++ri)
            scene.forces.push_back(
                LateralSpringForce{ci, ri, ci + 1, ri, 0.4, dx_cols});
    }
    return scene;
}

namespace {

constexpr char kDatasetMagic[9] = "RCDATA\0";

void write_vec3s(BinaryWriter& w, const std::vector<Vec3>& v) {
    for (const Vec3& p : v) {
        w.f64(p.x);
        w.f64(p.y);
        w.f64(p.z);
    }
}

void read_vec3s(BinaryReader& r, std::vector<Vec3>& v, std::size_t n) {
    v.resize(n);
    for (Vec3& p : v) {
        p.x = r.f64();
        p.y = r.f64();
        p.z = r.f64();
    }
}

void write_primitive(BinaryWriter& w, const SdfPrimitive& p) {
    if (const auto* s = std::get_if<SphereSdf>(&p)) {
        w.u8(0);
        for (double v : {s->center.x, s->center.y, s->center.z, s->radius}) w.f64(v);
    } else if (const auto* c = std::get_if<CapsuleSdf>(&p)) {
        w.u8(1);
        for (double v : {c->p0.x, c->p0.y, c->p0.z, c->p1.x, c->p1.y, c->p1.z, c->radius})
            w.f64(v);
    } else {
        const auto& b = std::get<RoundedBoxSdf>(p);
        w.u8(2);
        for (double v : {b.center.x, b.center.y, b.center.z, b.axis.x, b.axis.y, b.axis.z,
                         b.angle, b.half_extents.x, b.half_extents.y, b.half_extents.z,
                         b.radius})
            w.f64(v);
    }
}

SdfPrimitive read_primitive(BinaryReader& r) {
    const std::uint8_t kind = r.u8();
    if (kind == 0) {
        SphereSdf s;
        s.center = {r.f64(), r.f64(), r.f64()};
        s.radius = r.f64();
        return s;
    }
    if (kind == 1) {
        CapsuleSdf c;
        c.p0 = {r.f64(), r.f64(), r.f64()};
        c.p1 = {r.f64(), r.f64(), r.f64()};
        c.radius = r.f64();
        return c;
    }
    if (kind != 2) throw IoError("unknown SDF primitive kind in dataset");
    RoundedBoxSdf b;
    b.center = {r.f64(), r.f64(), r.f64()};
    b.axis = {r.f64(), r.f64(), r.f64()};
    b.angle = r.f64();
    b.half_extents = {r.f64(), r.f64(), r.f64()};
    b.radius = r.f64();
    return b;
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
    BinaryWriter w(path);
    w.magic(kDatasetMagic);
    w.u32(1);  // version
    w.u32(static_cast<std::uint32_t>(dataset.rest_vertices.size()));
    w.u32(static_cast<std::uint32_t>(dataset.faces.size()));
    w.u32(static_cast<std::uint32_t>(dataset.rest_bones.size()));
    w.u32(static_cast<std::uint32_t>(dataset.frames.size()));
    w.u32(static_cast<std::uint32_t>(dataset.body.size()));
    w.u32(static_cast<std::uint32_t>(dataset.body_motion.size()));
    w.f64(dataset.frame_dt);
    write_vec3s(w, dataset.rest_vertices);
    for (const auto& f : dataset.faces)
        for (std::uint32_t v : f) w.u32(v);
    write_vec3s(w, dataset.rest_bones);
    for (const BoneEmbedding& e : dataset.embeddings) {
        w.u32(e.triangle);
        for (double b : e.bary) w.f64(b);
        w.u8(e.simulated ? 1 : 0);
    }
    for (const SdfPrimitive& p : dataset.body) write_primitive(w, p);
    for (const MotionKey& k : dataset.body_motion) {
        w.f64(k.t);
        for (double v : {k.translation.x, k.translation.y, k.translation.z,
                         k.rotation_vector.x, k.rotation_vector.y, k.rotation_vector.z})
            w.f64(v);
    }
    for (const DatasetFrame& f : dataset.frames) {
        w.f64(f.time);
        for (double v : {f.root_frame.translation.x, f.root_frame.translation.y,
                         f.root_frame.translation.z})
            w.f64(v);
        for (int c = 0; c < 3; ++c) {
            w.f64(f.root_frame.rotation.col[c].x);
            w.f64(f.root_frame.rotation.col[c].y);
            w.f64(f.root_frame.rotation.col[c].z);
        }
        w.u8(static_cast<std::uint8_t>(f.split));
        write_vec3s(w, f.vertices);
        write_vec3s(w, f.bones);
    }
    w.close();
}

Dataset read_dataset(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.expect_magic(kDatasetMagic);
    if (r.u32() != 1) throw IoError("unsupported dataset version");
    const std::uint32_t n_vertices = r.u32();
    const std::uint32_t n_faces = r.u32();
    const std::uint32_t n_bones = r.u32();
    const std::uint32_t n_frames = r.u32();
    const std::uint32_t n_primitives = r.u32();
    const std::uint32_t n_motion = r.u32();

    Dataset dataset;
    dataset.frame_dt = r.f64();
    read_vec3s(r, dataset.rest_vertices, n_vertices);
    dataset.faces.resize(n_faces);
    for (auto& f : dataset.faces)
        for (std::uint32_t& v : f) v = r.u32();
    read_vec3s(r, dataset.rest_bones, n_bones);
    dataset.embeddings.resize(n_bones);
    for (BoneEmbedding& e : dataset.embeddings) {
        e.triangle = r.u32();
        for (double& b : e.bary) b = r.f64();
        e.simulated = r.u8() != 0;
    }
    dataset.body.reserve(n_primitives);
    for (std::uint32_t i = 0; i < n_primitives; ++i) dataset.body.push_back(read_primitive(r));
    dataset.body_motion.resize(n_motion);
    for (MotionKey& k : dataset.body_motion) {
        k.t = r.f64();
        k.translation = {r.f64(), r.f64(), r.f64()};
        k.rotation_vector = {r.f64(), r.f64(), r.f64()};
    }
    dataset.frames.resize(n_frames);
    for (DatasetFrame& f : dataset.frames) {
        f.time = r.f64();
        f.root_frame.translation = {r.f64(), r.f64(), r.f64()};
        for (int c = 0; c < 3; ++c)
            f.root_frame.rotation.col[c] = {r.f64(), r.f64(), r.f64()};
        f.split = static_cast<Split>(r.u8());
        read_vec3s(r, f.vertices, n_vertices);
        read_vec3s(r, f.bones, n_bones);
    }
    return dataset;
}

void write_dataset_csv(std::ostream& os, const Dataset& dataset) {
    os << "frame,time,split,kind,index,x,y,z\n";
    for (std::size_t f = 0; f < dataset.frames.size(); ++f) {
        const DatasetFrame& frame = dataset.frames[f];
        const char* split = frame.split == Split::Train
                                ? "train"
                                : (frame.split == Split::Validation ? "val" : "holdout");
        auto row = [&](const char* kind, std::size_t i, const Vec3& p) {
            os << f << ',' << format_double(frame.time) << ',' << split << ',' << kind << ','
               << i << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
               << format_double(p.z) << '\n';
        };
        for (std::size_t i = 0; i < frame.vertices.size(); ++i)
            row("vertex", i, frame.vertices[i]);
        for (std::size_t i = 0; i < frame.bones.size(); ++i) row("bone", i, frame.bones[i]);
    }
}

}  // namespace ropecloth
