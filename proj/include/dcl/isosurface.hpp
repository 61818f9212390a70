#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dcl/common.hpp"
#include "dcl/mesh.hpp"
#include "dcl/parallel.hpp"
#include "dcl/tpms.hpp"

namespace dcl::lattice {

// Zero-level extraction on a uniform grid via tetrahedral decomposition.
//
// Each cube is split into the six tetrahedra spanned by the edge paths from
// corner 000 to corner 111. Every cube uses the same main diagonal, so face
// diagonals of neighboring cubes coincide and the extracted surface is a
// closed, consistently oriented 2-manifold whenever the field is positive on
// the whole grid boundary. Crossings are found by linear interpolation along
// tet edges; parameters are clamped away from the endpoints so no output
// triangle can collapse.

namespace detail {

// corner k of a cube at bit-coded offset (x = bit0, y = bit1, z = bit2)
inline constexpr int kCornerDx[8] = {0, 1, 0, 1, 0, 1, 0, 1};
inline constexpr int kCornerDy[8] = {0, 0, 1, 1, 0, 0, 1, 1};
inline constexpr int kCornerDz[8] = {0, 0, 0, 0, 1, 1, 1, 1};

// six tetrahedra sharing the 0-7 diagonal, each listed right-handed
// (positive determinant), which the winding tables below rely on
inline constexpr int kTets[6][4] = {
    {0, 1, 3, 7}, {0, 5, 1, 7}, {0, 3, 2, 7},
    {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 6, 4, 7},
};

// Per sign mask (bit v set when tet vertex v is inside, i.e. value < 0):
// up to two triangles, each given as three crossing edges (pairs of tet
// vertex positions). Orderings are even permutations of the right-handed
// tet, which makes every triangle wind outward (normal toward positive
// field). Unused slots are -1.
struct TetCase {
    int n_triangles;
    int edges[2][3][2];
};

inline constexpr TetCase kTetCases[16] = {
    {0, {{{-1,-1},{-1,-1},{-1,-1}}, {{-1,-1},{-1,-1},{-1,-1}}}},               // 0000
    {1, {{{0,1},{0,2},{0,3}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 0001
    {1, {{{1,0},{1,3},{1,2}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 0010
    {2, {{{0,2},{0,3},{1,3}}, {{0,2},{1,3},{1,2}}}},                           // 0011
    {1, {{{2,3},{2,0},{2,1}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 0100
    {2, {{{0,3},{0,1},{2,1}}, {{0,3},{2,1},{2,3}}}},                           // 0101
    {2, {{{1,0},{1,3},{2,3}}, {{1,0},{2,3},{2,0}}}},                           // 0110
    {1, {{{0,3},{1,3},{2,3}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 0111
    {1, {{{3,2},{3,1},{3,0}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 1000
    {2, {{{0,1},{0,2},{3,2}}, {{0,1},{3,2},{3,1}}}},                           // 1001
    {2, {{{1,2},{1,0},{3,0}}, {{1,2},{3,0},{3,2}}}},                           // 1010
    {1, {{{1,2},{0,2},{3,2}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 1011
    {2, {{{2,0},{2,1},{3,1}}, {{2,0},{3,1},{3,0}}}},                           // 1100
    {1, {{{2,1},{3,1},{0,1}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 1101
    {1, {{{3,0},{2,0},{1,0}}, {{-1,-1},{-1,-1},{-1,-1}}}},                     // 1110
    {0, {{{-1,-1},{-1,-1},{-1,-1}}, {{-1,-1},{-1,-1},{-1,-1}}}},               // 1111
};

struct EdgeKeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
        return std::size_t(k.first * 0x9e3779b97f4a7c15ULL ^ k.second);
    }
};

}  // namespace detail

struct IsoGrid {
    Aabb box;                    // sampled region (field must be > 0 on its boundary)
    int nx = 0, ny = 0, nz = 0;  // cell counts per axis
    std::vector<double> values;  // (nx+1)*(ny+1)*(nz+1) samples

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(k) * (ny + 1) + j) * (nx + 1) + i;
    }
    Vec3 point(int i, int j, int k) const {
        const Vec3 e = box.extent();
        return {box.lo.x + e.x * double(i) / nx, box.lo.y + e.y * double(j) / ny,
                box.lo.z + e.z * double(k) / nz};
    }
};

/// Samples field(p) on a (nx+1)x(ny+1)x(nz+1) grid over `box`. Parallel over
/// z-slabs; each sample depends only on its own grid index, so the result is
/// identical for any worker count. Values with magnitude below `snap` are
/// pushed to +snap, keeping crossings strictly off grid vertices.
template <typename Field>
IsoGrid sample_grid(const Field& field, const Aabb& box, int nx, int ny, int nz,
                    double snap = 1e-9) {
    IsoGrid g;
    g.box = box;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.values.resize(std::size_t(nx + 1) * (ny + 1) * (nz + 1));
    parallel_chunks(std::size_t(nz) + 1, 1, [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            for (int j = 0; j <= g.ny; ++j) {
                for (int i = 0; i <= g.nx; ++i) {
                    double v = field(g.point(i, j, int(k)));
                    if (v > -snap && v < snap) v = snap;
                    g.values[g.index(i, j, int(k))] = v;
                }
            }
        }
    });
    return g;
}

/// Extracts the 0-level of the sampled field as a watertight triangle mesh
/// oriented outward (toward positive values). Throws "empty lattice" when no
/// cell straddles the level set.
inline SurfaceMesh extract_isosurface(const IsoGrid& grid) {
    SurfaceMesh mesh;
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t,
                       detail::EdgeKeyHash>
        edge_vertex;

    std::uint64_t cid[8];
    Vec3 cp[8];
    double cv[8];

    // crossing vertex on the grid segment a-b, shared via the canonical key so
    // every tet touching the segment reuses the identical point
    auto crossing = [&](int a, int b) -> std::uint32_t {
        std::uint64_t ia = cid[a], ib = cid[b];
        const bool flip = ia > ib;
        if (flip) std::swap(ia, ib);
        auto it = edge_vertex.find({ia, ib});
        if (it != edge_vertex.end()) return it->second;
        const double v0 = flip ? cv[b] : cv[a], v1 = flip ? cv[a] : cv[b];
        const Vec3 p0 = flip ? cp[b] : cp[a], p1 = flip ? cp[a] : cp[b];
        double s = v0 / (v0 - v1);
        // keep crossings at least ~4 um off grid vertices so triangles from
        // surface-grazing corners cannot collapse below the area contract
        const double sigma =
            std::min(0.45, std::max(0.002, 4e-6 / norm(p1 - p0)));
        s = std::min(1.0 - sigma, std::max(sigma, s));
        const std::uint32_t id = std::uint32_t(mesh.vertices.size());
        mesh.vertices.push_back(p0 + s * (p1 - p0));
        edge_vertex.emplace(std::make_pair(ia, ib), id);
        return id;
    };

    for (int k = 0; k < grid.nz; ++k) {
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                bool any_neg = false, any_pos = false;
                for (int c = 0; c < 8; ++c) {
                    cid[c] = grid.index(i + detail::kCornerDx[c], j + detail::kCornerDy[c],
                                        k + detail::kCornerDz[c]);
                    cv[c] = grid.values[cid[c]];
                    (cv[c] < 0.0 ? any_neg : any_pos) = true;
                }
                if (!any_neg || !any_pos) continue;
                for (int c = 0; c < 8; ++c)
                    cp[c] = grid.point(i + detail::kCornerDx[c], j + detail::kCornerDy[c],
                                       k + detail::kCornerDz[c]);

                for (const auto& tet : detail::kTets) {
                    int mask = 0;
                    for (int v = 0; v < 4; ++v)
                        if (cv[tet[v]] < 0.0) mask |= 1 << v;
                    const detail::TetCase& tc = detail::kTetCases[mask];
                    for (int t = 0; t < tc.n_triangles; ++t) {
                        std::uint32_t tri[3];
                        for (int e = 0; e < 3; ++e)
                            tri[e] = crossing(tet[tc.edges[t][e][0]], tet[tc.edges[t][e][1]]);
                        mesh.triangles.push_back({tri[0], tri[1], tri[2]});
                    }
                }
            }
        }
    }

    if (mesh.triangles.empty()) throw ValidationError("empty lattice");
    return mesh;
}

/// Meshes the 0-level of an arbitrary signed field over `box` at cell size `h`.
/// The grid is padded by two cells so the surface never touches the sample
/// boundary as long as the field is positive outside `box`.
template <typename Field>
SurfaceMesh mesh_implicit(const Field& field, const Aabb& box, double h) {
    if (!(h > 0.0)) throw ValidationError("mesh_implicit: cell size must be > 0");
    const Vec3 e = box.extent();
    const int pad = 2;
    const int nx = int(std::ceil(e.x / h)) + 2 * pad;
    const int ny = int(std::ceil(e.y / h)) + 2 * pad;
    const int nz = int(std::ceil(e.z / h)) + 2 * pad;
    Aabb grid_box{{box.lo.x - pad * h, box.lo.y - pad * h, box.lo.z - pad * h},
                  {box.lo.x + (nx - pad) * h, box.lo.y + (ny - pad) * h,
                   box.lo.z + (nz - pad) * h}};
    IsoGrid g = sample_grid(field, grid_box, nx, ny, nz);
    return extract_isosurface(g);
}

/// Composes the lattice shell with a domain via max(). The domain's metric
/// signed distance is rescaled into field units (one normalized lattice unit
/// per cell_size/2pi meters); with mismatched scales the interpolated
/// crossings would drift off the true surface near the domain boundary.
template <typename Domain>
auto lattice_in_domain(const TpmsField& field, const Domain& domain) {
    const double to_field_units = kTwoPi / field.cell_size;
    return [field, domain, to_field_units](const Vec3& p) {
        return std::max(shell_value(field, p),
                        domain.signed_distance(p) * to_field_units);
    };
}

/// Printable module body: { |g - t| <= w } intersected with the sector domain.
/// resolution = grid cells per lattice unit cell.
inline SurfaceMesh mesh_module(const TpmsField& field, const SectorDomain& domain,
                               int resolution) {
    field.validate();
    domain.validate();
    if (resolution < 16) throw ValidationError("mesh_module: resolution must be >= 16");
    const double h = field.cell_size / double(resolution);
    SurfaceMesh mesh = mesh_implicit(lattice_in_domain(field, domain), domain.aabb(), h);
    validate_mesh(mesh);
    return mesh;
}

}  // namespace dcl::lattice
