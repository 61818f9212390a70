#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "dcl/common.hpp"

namespace dcl::lattice {

/// Indexed triangle mesh. The meshing path guarantees the contract checked by
/// validate(): closed 2-manifold edges, consistent outward winding, no degenerate
/// triangles.
struct SurfaceMesh {
    std::vector<Vec3> vertices;                     // m
    std::vector<std::array<std::uint32_t, 3>> triangles;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
};

inline double triangle_area(const SurfaceMesh& m, std::size_t t) {
    const Vec3& a = m.vertices[m.triangles[t][0]];
    const Vec3& b = m.vertices[m.triangles[t][1]];
    const Vec3& c = m.vertices[m.triangles[t][2]];
    return 0.5 * norm(cross(b - a, c - a));
}

/// Divergence-theorem volume; positive when winding is consistently outward.
inline double mesh_volume(const SurfaceMesh& m) {
    double six_v = 0.0;
    for (const auto& t : m.triangles) {
        const Vec3& a = m.vertices[t[0]];
        const Vec3& b = m.vertices[t[1]];
        const Vec3& c = m.vertices[t[2]];
        six_v += dot(a, cross(b, c));
    }
    return six_v / 6.0;
}

struct MeshDiagnostics {
    bool watertight = false;        // every edge shared by exactly 2 triangles
    bool oriented = false;          // each shared edge traversed once per direction
    double min_triangle_area = 0.0; // m^2
    double signed_volume = 0.0;     // m^3
    std::size_t edge_count = 0;
    long long euler_characteristic = 0;
};

inline MeshDiagnostics analyze_mesh(const SurfaceMesh& m) {
    MeshDiagnostics d;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<int, int>> edges;
    for (const auto& t : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            std::uint32_t a = t[e], b = t[(e + 1) % 3];
            auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
            auto& rec = edges[key];
            ++rec.first;                  // total incidences
            if (a < b) ++rec.second;      // forward traversals
        }
    }
    d.watertight = !edges.empty();
    d.oriented = !edges.empty();
    for (const auto& [key, rec] : edges) {
        if (rec.first != 2) d.watertight = false;
        if (rec.first == 2 && rec.second != 1) d.oriented = false;
    }
    d.edge_count = edges.size();
    d.euler_characteristic = (long long)m.vertex_count() - (long long)d.edge_count +
                             (long long)m.triangle_count();
    d.min_triangle_area = m.triangles.empty() ? 0.0 : 1e300;
    for (std::size_t t = 0; t < m.triangle_count(); ++t)
        d.min_triangle_area = std::min(d.min_triangle_area, triangle_area(m, t));
    d.signed_volume = mesh_volume(m);
    return d;
}

inline void validate_mesh(const SurfaceMesh& m) {
    if (m.triangles.empty()) throw ValidationError("mesh: empty");
    MeshDiagnostics d = analyze_mesh(m);
    if (!d.watertight) throw ValidationError("mesh: not watertight (open or non-manifold edge)");
    if (!d.oriented) throw ValidationError("mesh: inconsistent triangle orientation");
    if (d.min_triangle_area <= 1e-12)
        throw ValidationError("mesh: degenerate triangle (area <= 1e-12 m^2)");
    if (d.signed_volume <= 0.0) throw ValidationError("mesh: signed volume not positive");
}

}  // namespace dcl::lattice
