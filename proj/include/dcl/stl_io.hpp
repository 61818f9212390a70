#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dcl/io.hpp"
#include "dcl/mesh.hpp"

namespace dcl::lattice {

// Binary STL, little-endian: 80-byte header, uint32 triangle count, then per
// triangle a float32 normal, three float32 vertices and a zero uint16
// attribute (50 bytes each). File size is exactly 84 + 50 * n_triangles.

namespace detail {

inline void put_f32(std::string& out, float v) {
    static_assert(sizeof(float) == 4);
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

inline float get_f32(const char* p) {
    float v;
    std::memcpy(&v, p, 4);
    return v;
}

}  // namespace detail

inline std::string encode_stl(const SurfaceMesh& mesh) {
    std::string out;
    out.reserve(84 + 50 * mesh.triangle_count());
    std::string header = "dcl lattice surface (binary stl)";
    header.resize(80, '\0');
    out += header;
    const std::uint32_t n = std::uint32_t(mesh.triangle_count());
    char nb[4];
    std::memcpy(nb, &n, 4);
    out.append(nb, 4);
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        Vec3 nrm = cross(b - a, c - a);
        const double len = norm(nrm);
        if (len > 0.0) nrm = nrm / len;
        detail::put_f32(out, float(nrm.x));
        detail::put_f32(out, float(nrm.y));
        detail::put_f32(out, float(nrm.z));
        for (const Vec3* v : {&a, &b, &c}) {
            detail::put_f32(out, float(v->x));
            detail::put_f32(out, float(v->y));
            detail::put_f32(out, float(v->z));
        }
        out.append(2, '\0');  // attribute byte count
    }
    return out;
}

inline void export_stl(const SurfaceMesh& mesh, const std::string& path) {
    atomic_write_file(path, encode_stl(mesh));
}

/// Re-imports a binary STL. Vertices are welded by exact float32 coordinates,
/// so a write/read round trip reproduces the mesh connectivity (positions at
/// float32 precision).
inline SurfaceMesh import_stl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open STL file: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 84) throw IoError("truncated STL file: " + path);
    std::uint32_t n;
    std::memcpy(&n, data.data() + 80, 4);
    if (data.size() != 84 + std::size_t(n) * 50)
        throw IoError("STL size mismatch in " + path);

    SurfaceMesh mesh;
    struct Key {
        float x, y, z;
        bool operator==(const Key& o) const { return x == o.x && y == o.y && z == o.z; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint32_t a, b, c;
            std::memcpy(&a, &k.x, 4);
            std::memcpy(&b, &k.y, 4);
            std::memcpy(&c, &k.z, 4);
            return (std::size_t(a) * 73856093u) ^ (std::size_t(b) * 19349663u) ^
                   (std::size_t(c) * 83492791u);
        }
    };
    std::unordered_map<Key, std::uint32_t, KeyHash> seen;
    auto vertex_id = [&](const char* p) {
        Key k{detail::get_f32(p), detail::get_f32(p + 4), detail::get_f32(p + 8)};
        auto it = seen.find(k);
        if (it != seen.end()) return it->second;
        const std::uint32_t id = std::uint32_t(mesh.vertices.size());
        mesh.vertices.push_back({double(k.x), double(k.y), double(k.z)});
        seen.emplace(k, id);
        return id;
    };
    for (std::uint32_t t = 0; t < n; ++t) {
        const char* tri = data.data() + 84 + std::size_t(t) * 50;
        mesh.triangles.push_back(
            {vertex_id(tri + 12), vertex_id(tri + 24), vertex_id(tri + 36)});
    }
    return mesh;
}

}  // namespace dcl::lattice
