#ifndef HOWIRE_VOXEL_HPP
#define HOWIRE_VOXEL_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "howire/error.hpp"
#include "howire/mesh.hpp"
#include "howire/rng.hpp"
#include "howire/wireframe.hpp"

namespace howire {

using Cell = std::array<int, 3>;

inline constexpr int kMaxGridDim = 8;

/// Occupancy grid of unit cubes, at most 8 cells per axis.
class VoxelSolid {
public:
    VoxelSolid(int nx, int ny, int nz, double voxel_size = 1.0) : dims_{nx, ny, nz}, voxel_size_(voxel_size) {
        for (int d : dims_)
            if (d < 1 || d > kMaxGridDim) throw ValidationError("voxel grid dimensions must be in [1, 8]");
        if (!(voxel_size > 0)) throw ValidationError("voxel size must be positive");
        occupied_.assign(static_cast<std::size_t>(nx) * ny * nz, 0);
    }

    /// Builds a solid from an explicit cell list; grid dims are the tight bounds.
    static VoxelSolid from_cells(const std::vector<Cell>& cells, double voxel_size = 1.0) {
        if (cells.empty()) throw ValidationError("voxel solid needs at least one cell");
        Cell lo = cells.front(), hi = cells.front();
        for (const Cell& c : cells)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], c[a]);
                hi[a] = std::max(hi[a], c[a]);
            }
        VoxelSolid s(hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1, voxel_size);
        for (const Cell& c : cells) s.set({c[0] - lo[0], c[1] - lo[1], c[2] - lo[2]}, true);
        return s;
    }

    const std::array<int, 3>& dims() const { return dims_; }
    double voxel_size() const { return voxel_size_; }

    bool in_grid(const Cell& c) const {
        return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < dims_[0] && c[1] < dims_[1] && c[2] < dims_[2];
    }
    bool at(const Cell& c) const { return in_grid(c) && occupied_[index(c)] != 0; }
    void set(const Cell& c, bool v) {
        if (!in_grid(c)) throw ValidationError("cell outside voxel grid");
        occupied_[index(c)] = v ? 1 : 0;
    }

    std::vector<Cell> cells() const {
        std::vector<Cell> out;
        for (int z = 0; z < dims_[2]; ++z)
            for (int y = 0; y < dims_[1]; ++y)
                for (int x = 0; x < dims_[0]; ++x)
                    if (at({x, y, z})) out.push_back({x, y, z});
        return out;
    }
    std::size_t count() const { return static_cast<std::size_t>(std::count(occupied_.begin(), occupied_.end(), 1)); }

    /// Single 6-connected component with at least one cell.
    bool is_connected() const {
        const auto all = cells();
        if (all.empty()) return false;
        std::set<Cell> seen{all.front()};
        std::vector<Cell> stack{all.front()};
        while (!stack.empty()) {
            const Cell c = stack.back();
            stack.pop_back();
            for (const Cell& n : face_neighbors(c))
                if (at(n) && seen.insert(n).second) stack.push_back(n);
        }
        return seen.size() == all.size();
    }

    static std::array<Cell, 6> face_neighbors(const Cell& c) {
        return {{{c[0] + 1, c[1], c[2]}, {c[0] - 1, c[1], c[2]}, {c[0], c[1] + 1, c[2]},
                 {c[0], c[1] - 1, c[2]}, {c[0], c[1], c[2] + 1}, {c[0], c[1], c[2] - 1}}};
    }

private:
    std::size_t index(const Cell& c) const {
        return (static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0];
    }

    std::array<int, 3> dims_;
    double voxel_size_;
    std::vector<std::uint8_t> occupied_;
};

namespace detail {

/// The 2x2x2 cells around lattice vertex v must split into one face-connected
/// occupied group and one face-connected empty group for the boundary to be a
/// disk at v. This also rules out edge-only contacts.
inline bool vertex_is_manifold(const VoxelSolid& s, const Cell& v) {
    std::array<bool, 8> occ{};
    for (int i = 0; i < 8; ++i) occ[i] = s.at({v[0] - 1 + (i & 1), v[1] - 1 + ((i >> 1) & 1), v[2] - 1 + ((i >> 2) & 1)});
    auto components = [&](bool value) {
        int comps = 0;
        std::array<bool, 8> seen{};
        for (int start = 0; start < 8; ++start) {
            if (occ[start] != value || seen[start]) continue;
            ++comps;
            std::vector<int> stack{start};
            seen[start] = true;
            while (!stack.empty()) {
                const int c = stack.back();
                stack.pop_back();
                for (int bit : {1, 2, 4}) {
                    const int n = c ^ bit;
                    if (occ[n] == value && !seen[n]) {
                        seen[n] = true;
                        stack.push_back(n);
                    }
                }
            }
        }
        return comps;
    };
    return components(true) <= 1 && components(false) <= 1;
}

} // namespace detail

/// Checks every lattice vertex of the grid (and its one-cell margin).
inline bool boundary_is_manifold(const VoxelSolid& s) {
    const auto& d = s.dims();
    for (int z = 0; z <= d[2]; ++z)
        for (int y = 0; y <= d[1]; ++y)
            for (int x = 0; x <= d[0]; ++x)
                if (!detail::vertex_is_manifold(s, {x, y, z})) return false;
    return true;
}

/// Occupancy up to the 48 symmetries of the cube, as a canonical string.
inline std::string canonical_key(const VoxelSolid& s) {
    const auto cells = s.cells();
    std::vector<Cell> best;
    std::array<int, 3> perm{0, 1, 2};
    do {
        for (int signs = 0; signs < 8; ++signs) {
            std::vector<Cell> t;
            t.reserve(cells.size());
            for (const Cell& c : cells) {
                Cell m;
                for (int a = 0; a < 3; ++a) m[a] = ((signs >> a) & 1 ? -1 : 1) * c[perm[a]];
                t.push_back(m);
            }
            Cell lo = t.front();
            for (const Cell& c : t)
                for (int a = 0; a < 3; ++a) lo[a] = std::min(lo[a], c[a]);
            for (Cell& c : t)
                for (int a = 0; a < 3; ++a) c[a] -= lo[a];
            std::sort(t.begin(), t.end());
            if (best.empty() || t < best) best = std::move(t);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::string key;
    for (const Cell& c : best) key += std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + ";";
    return key;
}

/// A solid together with its boundary mesh and sharp-edge wireframe, centered at the origin.
struct Solid {
    VoxelSolid voxels;
    TriangleMesh mesh;
    WireframeGraph wireframe;  // world frame, unlabeled
    std::string key;
};

/// Extracts the boundary mesh and the wireframe of sharp edges.
///
/// Boundary faces are unit quads split into two triangles each. A lattice
/// edge is sharp when its two boundary faces have different normals. Straight
/// runs of sharp edges are merged into single lines; junctions are the lattice
/// vertices where sharp edges meet in at least two directions.
inline Solid build_solid(const VoxelSolid& voxels) {
    if (voxels.count() == 0 || !voxels.is_connected()) throw ValidationError("voxel solid must be one connected piece");
    if (!boundary_is_manifold(voxels)) throw ValidationError("voxel solid boundary is not a 2-manifold");

    struct Face {
        std::array<Cell, 4> corners;
        int normal;  // axis * 2 + (sign < 0)
    };
    std::vector<Face> faces;
    for (const Cell& c : voxels.cells()) {
        for (int axis = 0; axis < 3; ++axis) {
            const int u = (axis + 1) % 3, v = (axis + 2) % 3;
            for (int sign : {1, -1}) {
                Cell n = c;
                n[axis] += sign;
                if (voxels.at(n)) continue;
                Cell base = c;
                if (sign > 0) base[axis] += 1;
                Cell bu = base, buv = base, bv = base;
                bu[u] += 1;
                buv[u] += 1;
                buv[v] += 1;
                bv[v] += 1;
                Face f{{base, bu, buv, bv}, axis * 2 + (sign < 0 ? 1 : 0)};
                if (sign < 0) std::swap(f.corners[1], f.corners[3]);
                faces.push_back(f);
            }
        }
    }

    const Vec3 center = 0.5 * voxels.voxel_size() *
                        Vec3{static_cast<double>(voxels.dims()[0]), static_cast<double>(voxels.dims()[1]),
                             static_cast<double>(voxels.dims()[2])};
    auto to_world = [&](const Cell& p) {
        return voxels.voxel_size() * Vec3{static_cast<double>(p[0]), static_cast<double>(p[1]), static_cast<double>(p[2])} -
               center;
    };

    Solid out{voxels, {}, {}, canonical_key(voxels)};
    std::map<Cell, std::uint32_t> vertex_index;
    auto vertex = [&](const Cell& p) {
        auto [it, inserted] = vertex_index.try_emplace(p, static_cast<std::uint32_t>(out.mesh.vertices.size()));
        if (inserted) out.mesh.vertices.push_back(to_world(p));
        return it->second;
    };
    // Face normals seen on each undirected unit edge.
    std::map<std::pair<Cell, Cell>, std::vector<int>> edge_normals;
    for (const Face& f : faces) {
        std::array<std::uint32_t, 4> q{};
        for (int i = 0; i < 4; ++i) q[i] = vertex(f.corners[i]);
        out.mesh.triangles.push_back({q[0], q[1], q[2]});
        out.mesh.triangles.push_back({q[0], q[2], q[3]});
        for (int i = 0; i < 4; ++i) {
            Cell a = f.corners[i], b = f.corners[(i + 1) % 4];
            if (b < a) std::swap(a, b);
            edge_normals[{a, b}].push_back(f.normal);
        }
    }

    // Sharp unit edges per lattice vertex, as direction indices 0..5 (+x,-x,+y,-y,+z,-z).
    std::map<Cell, std::array<bool, 6>> sharp;
    for (const auto& [edge, normals] : edge_normals) {
        if (normals.size() != 2) throw ValidationError("voxel boundary edge is not shared by exactly two faces");
        if (normals[0] == normals[1]) continue;
        const auto& [a, b] = edge;
        int axis = 0;
        while (a[axis] == b[axis]) ++axis;
        sharp[a][axis * 2] = true;
        sharp[b][axis * 2 + 1] = true;
    }

    auto is_junction = [](const std::array<bool, 6>& dirs) {
        int axes = 0;
        for (int a = 0; a < 3; ++a) axes += (dirs[a * 2] || dirs[a * 2 + 1]) ? 1 : 0;
        return axes >= 2;
    };

    // Junctions ordered by (z, y, x) lattice position.
    std::vector<Cell> junction_cells;
    for (const auto& [p, dirs] : sharp)
        if (is_junction(dirs)) junction_cells.push_back(p);
    std::sort(junction_cells.begin(), junction_cells.end(), [](const Cell& a, const Cell& b) {
        return std::tie(a[2], a[1], a[0]) < std::tie(b[2], b[1], b[0]);
    });
    std::map<Cell, std::size_t> junction_index;
    for (std::size_t i = 0; i < junction_cells.size(); ++i) {
        junction_index[junction_cells[i]] = i;
        out.wireframe.junctions3d.push_back(to_world(junction_cells[i]));
    }

    std::set<std::pair<std::size_t, std::size_t>> lines;
    for (std::size_t i = 0; i < junction_cells.size(); ++i) {
        const auto& dirs = sharp.at(junction_cells[i]);
        for (int d = 0; d < 6; ++d) {
            if (!dirs[d]) continue;
            const int axis = d / 2, step = d % 2 == 0 ? 1 : -1;
            Cell p = junction_cells[i];
            while (true) {
                p[axis] += step;
                if (junction_index.count(p)) break;
                const auto it = sharp.find(p);
                if (it == sharp.end() || !it->second[d]) throw ValidationError("broken sharp-edge chain");
            }
            const std::size_t j = junction_index.at(p);
            lines.insert({std::min(i, j), std::max(i, j)});
        }
    }
    for (const auto& [a, b] : lines) out.wireframe.lines.push_back({a, b});
    return out;
}

struct SolidGenParams {
    std::array<int, 3> grid_limits{4, 4, 4};
    int min_voxels = 2;
    int max_voxels = 6;
    double voxel_size = 1.0;
};

/// Random connected manifold voxel solid; fully determined by the seed.
///
/// Grows from a random seed cell by adding random face neighbors, skipping
/// any addition that would create a non-manifold vertex or edge.
inline Solid generate_solid(std::uint64_t seed, const SolidGenParams& params = {}) {
    for (int lim : params.grid_limits)
        if (lim < 1 || lim > kMaxGridDim) throw ValidationError("grid limits must be in [1, 8]");
    Rng rng(seed);
    const int nx = 1 + static_cast<int>(rng.uniform_int(params.grid_limits[0]));
    const int ny = 1 + static_cast<int>(rng.uniform_int(params.grid_limits[1]));
    const int nz = 1 + static_cast<int>(rng.uniform_int(params.grid_limits[2]));
    const int cells = nx * ny * nz;
    const int lo = std::clamp(params.min_voxels, 1, cells);
    const int hi = std::clamp(params.max_voxels, lo, cells);
    const int target = lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));

    VoxelSolid grid(nx, ny, nz, params.voxel_size);
    const Cell start{static_cast<int>(rng.uniform_int(nx)), static_cast<int>(rng.uniform_int(ny)),
                     static_cast<int>(rng.uniform_int(nz))};
    grid.set(start, true);

    auto locally_manifold = [&](const Cell& c) {
        for (int i = 0; i < 8; ++i)
            if (!detail::vertex_is_manifold(grid, {c[0] + (i & 1), c[1] + ((i >> 1) & 1), c[2] + ((i >> 2) & 1)}))
                return false;
        return true;
    };

    std::set<Cell> rejected;
    while (static_cast<int>(grid.count()) < target) {
        std::vector<Cell> frontier;
        for (const Cell& c : grid.cells())
            for (const Cell& n : VoxelSolid::face_neighbors(c))
                if (grid.in_grid(n) && !grid.at(n) && !rejected.count(n)) frontier.push_back(n);
        std::sort(frontier.begin(), frontier.end());
        frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
        if (frontier.empty()) break;
        const Cell pick = frontier[rng.uniform_int(frontier.size())];
        grid.set(pick, true);
        if (!locally_manifold(pick)) {
            grid.set(pick, false);
            rejected.insert(pick);
        } else {
            rejected.clear();
        }
    }
    return build_solid(VoxelSolid::from_cells(grid.cells(), params.voxel_size));
}

} // namespace howire

#endif
