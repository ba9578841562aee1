#include "ropecloth/skinning_model.hpp"

#include <cassert>
#include <istream>
#include <ostream>
#include <sstream>

#include "ropecloth/io_util.hpp"

namespace ropecloth {

namespace {

constexpr char kModelMagic[9] = "RCMODEL\0";

void write_pca(BinaryWriter& w, const PcaModel& pca) {
    w.u32(static_cast<std::uint32_t>(pca.dim));
    w.u32(static_cast<std::uint32_t>(pca.components));
    w.u8(pca.rank_padded ? 1 : 0);
    w.f64_array(pca.mean);
    w.f64_array(pca.basis);
    w.f64_array(pca.singular_values);
}

PcaModel read_pca(BinaryReader& r) {
    PcaModel pca;
    pca.dim = r.u32();
    pca.components = r.u32();
    pca.rank_padded = r.u8() != 0;
    pca.mean.resize(pca.dim);
    pca.basis.resize(pca.dim * pca.components);
    pca.singular_values.resize(pca.components);
    r.f64_array(pca.mean);
    r.f64_array(pca.basis);
    r.f64_array(pca.singular_values);
    return pca;
}

void write_mlp(BinaryWriter& w, const Mlp2& net) {
    w.u32(static_cast<std::uint32_t>(net.in));
    w.u32(static_cast<std::uint32_t>(net.hidden));
    w.u32(static_cast<std::uint32_t>(net.out));
    for (const auto* v : {&net.w1, &net.b1, &net.w2, &net.b2, &net.w3, &net.b3})
        w.f64_array(*v);
}

Mlp2 read_mlp(BinaryReader& r) {
    Mlp2 net;
    net.in = r.u32();
    net.hidden = r.u32();
    net.out = r.u32();
    net.w1.resize(net.hidden * net.in);
    net.b1.resize(net.hidden);
    net.w2.resize(net.hidden * net.hidden);
    net.b2.resize(net.hidden);
    net.w3.resize(net.out * net.hidden);
    net.b3.resize(net.out);
    for (auto* v : {&net.w1, &net.b1, &net.w2, &net.b2, &net.w3, &net.b3})
        r.f64_array(*v);
    return net;
}

void write_vec3s(BinaryWriter& w, const std::vector<Vec3>& v) {
    for (const Vec3& p : v) {
        w.f64(p.x);
        w.f64(p.y);
        w.f64(p.z);
    }
}

void read_vec3s(BinaryReader& r, std::vector<Vec3>& v, std::size_t n) {
    v.resize(n);
    for (Vec3& p : v) p = {r.f64(), r.f64(), r.f64()};
}

}  // namespace

std::size_t SkinningModel::simulated_bone_count() const {
    std::size_t n = 0;
    for (std::uint8_t s : bone_simulated) n += s != 0;
    return n;
}

SkinningModel make_model_shell(const Dataset& dataset) {
    SkinningModel model;
    model.rest_vertices = dataset.rest_vertices;
    model.faces = dataset.faces;
    model.rest_bones = dataset.rest_bones;
    model.bone_simulated.reserve(dataset.embeddings.size());
    for (const BoneEmbedding& e : dataset.embeddings)
        model.bone_simulated.push_back(e.simulated ? 1 : 0);
    model.body = dataset.body;
    return model;
}

void write_model(const std::filesystem::path& path, const SkinningModel& model) {
    BinaryWriter w(path);
    w.magic(kModelMagic);
    w.u32(1);
    w.u32(static_cast<std::uint32_t>(model.rest_vertices.size()));
    w.u32(static_cast<std::uint32_t>(model.faces.size()));
    w.u32(static_cast<std::uint32_t>(model.rest_bones.size()));
    w.u32(static_cast<std::uint32_t>(model.body.size()));
    w.u8(model.has_shape ? 1 : 0);
    write_vec3s(w, model.rest_vertices);
    for (const auto& f : model.faces)
        for (std::uint32_t v : f) w.u32(v);
    write_vec3s(w, model.rest_bones);
    for (std::uint8_t s : model.bone_simulated) w.u8(s);
    for (const SdfPrimitive& p : model.body) {
        // Same encoding as the dataset format.
        if (const auto* s = std::get_if<SphereSdf>(&p)) {
            w.u8(0);
            for (double v : {s->center.x, s->center.y, s->center.z, s->radius}) w.f64(v);
        } else if (const auto* c = std::get_if<CapsuleSdf>(&p)) {
            w.u8(1);
            for (double v : {c->p0.x, c->p0.y, c->p0.z, c->p1.x, c->p1.y, c->p1.z,
                             c->radius})
                w.f64(v);
        } else {
            const auto& b = std::get<RoundedBoxSdf>(p);
            w.u8(2);
            for (double v : {b.center.x, b.center.y, b.center.z, b.axis.x, b.axis.y,
                             b.axis.z, b.angle, b.half_extents.x, b.half_extents.y,
                             b.half_extents.z, b.radius})
                w.f64(v);
        }
    }
    write_pca(w, model.skin_pca);
    write_mlp(w, model.skin_net);
    if (model.has_shape) {
        write_pca(w, model.shape_pca);
        write_mlp(w, model.shape_net);
    }
    w.close();
}

SkinningModel read_model(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.expect_magic(kModelMagic);
    if (r.u32() != 1) throw IoError("unsupported model version");
    const std::uint32_t n_vertices = r.u32();
    const std::uint32_t n_faces = r.u32();
    const std::uint32_t n_bones = r.u32();
    const std::uint32_t n_primitives = r.u32();
    SkinningModel model;
    model.has_shape = r.u8() != 0;
    read_vec3s(r, model.rest_vertices, n_vertices);
    model.faces.resize(n_faces);
    for (auto& f : model.faces)
        for (std::uint32_t& v : f) v = r.u32();
    read_vec3s(r, model.rest_bones, n_bones);
    model.bone_simulated.resize(n_bones);
    for (std::uint8_t& s : model.bone_simulated) s = r.u8();
    for (std::uint32_t i = 0; i < n_primitives; ++i) {
        const std::uint8_t kind = r.u8();
        if (kind == 0) {
            SphereSdf s;
            s.center = {r.f64(), r.f64(), r.f64()};
            s.radius = r.f64();
            model.body.push_back(s);
        } else if (kind == 1) {
            CapsuleSdf c;
            c.p0 = {r.f64(), r.f64(), r.f64()};
            c.p1 = {r.f64(), r.f64(), r.f64()};
            c.radius = r.f64();
            model.body.push_back(c);
        } else if (kind == 2) {
            RoundedBoxSdf b;
            b.center = {r.f64(), r.f64(), r.f64()};
            b.axis = {r.f64(), r.f64(), r.f64()};
            b.angle = r.f64();
            b.half_extents = {r.f64(), r.f64(), r.f64()};
            b.radius = r.f64();
            model.body.push_back(b);
        } else {
            throw IoError("unknown SDF primitive kind in model");
        }
    }
    model.skin_pca = read_pca(r);
    model.skin_net = read_mlp(r);
    if (model.has_shape) {
        model.shape_pca = read_pca(r);
        model.shape_net = read_mlp(r);
    }
    return model;
}

std::vector<Vec3> assemble_bones(const SkinningModel& model,
                                 std::span<const Vec3> simulated_world,
                                 const RigidPose& frame) {
    std::vector<Vec3> bones(model.rest_bones.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < bones.size(); ++i) {
        if (model.bone_simulated[i]) {
            if (next >= simulated_world.size())
                throw ConfigError("too few simulated bone positions for this model");
            bones[i] = simulated_world[next++];
        } else {
            bones[i] = frame.apply(model.rest_bones[i]);
        }
    }
    if (next != simulated_world.size())
        throw ConfigError("too many simulated bone positions for this model");
    return bones;
}

std::vector<Vec3> infer_mesh(const SkinningModel& model, std::span<const Vec3> bone_world,
                             const RigidPose& frame, bool use_shape) {
    if (bone_world.size() != model.rest_bones.size())
        throw ConfigError("bone count mismatch: model has " +
                          std::to_string(model.rest_bones.size()) + ", got " +
                          std::to_string(bone_world.size()));
    const std::vector<double> b =
        nonrigid_displacement(bone_world, model.rest_bones, frame);
    if (b.size() != model.skin_net.in)
        throw ConfigError("bone displacement dimension mismatch");

    MlpWorkspace ws;
    model.skin_net.forward(b, ws);
    std::vector<double> d(model.skin_pca.dim);
    pca_reconstruct(model.skin_pca, ws.y, d);

    if (use_shape && model.has_shape) {
        model.shape_net.forward(b, ws);
        std::vector<double> residual(model.shape_pca.dim);
        pca_reconstruct(model.shape_pca, ws.y, residual);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += residual[i];
    }

    std::vector<Vec3> out(model.rest_vertices.size());
    for (std::size_t v = 0; v < out.size(); ++v) {
        const Vec3 local{model.rest_vertices[v].x + d[3 * v + 0],
                         model.rest_vertices[v].y + d[3 * v + 1],
                         model.rest_vertices[v].z + d[3 * v + 2]};
        out[v] = frame.apply(local);
    }
    return out;
}

void write_obj(std::ostream& os, std::span<const Vec3> vertices,
               std::span<const std::array<std::uint32_t, 3>> faces) {
    for (const Vec3& v : vertices)
        os << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' '
           << format_double(v.z) << '\n';
    for (const auto& f : faces)
        os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void read_obj(std::istream& is, std::vector<Vec3>& vertices,
              std::vector<std::array<std::uint32_t, 3>>& faces) {
    vertices.clear();
    faces.clear();
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x >> v.y >> v.z;
            vertices.push_back(v);
        } else if (tag == "f") {
            std::array<std::uint32_t, 3> f{};
            ss >> f[0] >> f[1] >> f[2];
            for (std::uint32_t& i : f) --i;
            faces.push_back(f);
        }
    }
}

}  // namespace ropecloth
