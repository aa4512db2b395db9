#ifndef HOWIRE_MESH_HPP
#define HOWIRE_MESH_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "howire/camera.hpp"
#include "howire/error.hpp"
#include "howire/vec.hpp"

namespace howire {

struct Bounds {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void expand(Vec3 p) { lo = component_min(lo, p); hi = component_max(hi, p); }
    void expand(const Bounds& b) { lo = component_min(lo, b.lo); hi = component_max(hi, b.hi); }
    bool empty() const { return lo.x > hi.x; }
    Vec3 extent() const { return hi - lo; }
    Vec3 center() const { return 0.5 * (lo + hi); }
    double diagonal() const { return empty() ? 0.0 : norm(extent()); }
    bool contains(const Bounds& b) const {
        return lo.x <= b.lo.x && lo.y <= b.lo.y && lo.z <= b.lo.z && hi.x >= b.hi.x && hi.y >= b.hi.y &&
               hi.z >= b.hi.z;
    }
    int longest_axis() const {
        const Vec3 e = extent();
        return e.x >= e.y && e.x >= e.z ? 0 : (e.y >= e.z ? 1 : 2);
    }
};

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh; triangles wind counter-clockwise around the outward normal.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    std::size_t size() const { return triangles.size(); }
    bool empty() const { return triangles.empty(); }

    std::array<Vec3, 3> corners(std::size_t t) const {
        const Triangle& tri = triangles[t];
        return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
    }

    Vec3 normal(std::size_t t) const {
        const auto [a, b, c] = corners(t);
        return normalized(cross(b - a, c - a));
    }

    double area(std::size_t t) const {
        const auto [a, b, c] = corners(t);
        return 0.5 * norm(cross(b - a, c - a));
    }

    Bounds bounds() const {
        Bounds b;
        for (Vec3 v : vertices) b.expand(v);
        return b;
    }

    Bounds triangle_bounds(std::size_t t) const {
        Bounds b;
        for (Vec3 v : corners(t)) b.expand(v);
        return b;
    }

    void check() const {
        for (std::size_t t = 0; t < triangles.size(); ++t) {
            for (std::uint32_t i : triangles[t])
                if (i >= vertices.size())
                    throw ValidationError("triangle " + std::to_string(t) + " has an out-of-range vertex index");
            if (!(area(t) > 1e-12)) throw ValidationError("triangle " + std::to_string(t) + " is degenerate");
        }
    }

    /// Every undirected edge is shared by exactly two triangles with opposite orientation.
    bool is_watertight() const {
        std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
        for (const Triangle& t : triangles)
            for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
        for (const auto& [edge, count] : directed) {
            if (count != 1) return false;
            auto it = directed.find({edge.second, edge.first});
            if (it == directed.end() || it->second != 1) return false;
        }
        return true;
    }
};

inline TriangleMesh transform_mesh(const TriangleMesh& mesh, const CameraPose& pose) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = pose.apply(v);
    return out;
}

/// Closed box with every face split into an n x n quad grid (12 n^2 triangles, outward winding).
inline TriangleMesh subdivided_box(Vec3 lo, Vec3 hi, int n) {
    if (n < 1) throw ValidationError("subdivided_box: n must be positive");
    TriangleMesh mesh;
    std::map<std::array<int, 3>, std::uint32_t> index;
    auto vertex = [&](std::array<int, 3> g) {
        auto [it, inserted] = index.try_emplace(g, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (inserted) {
            Vec3 p;
            for (int a = 0; a < 3; ++a) p[a] = lo[a] + (hi[a] - lo[a]) * g[a] / n;
            mesh.vertices.push_back(p);
        }
        return it->second;
    };
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        for (int side = 0; side < 2; ++side)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    auto corner = [&](int di, int dj) {
                        std::array<int, 3> g{};
                        g[axis] = side * n;
                        g[u] = i + di;
                        g[v] = j + dj;
                        return vertex(g);
                    };
                    const std::uint32_t p00 = corner(0, 0), p10 = corner(1, 0), p11 = corner(1, 1), p01 = corner(0, 1);
                    if (side == 1) {
                        mesh.triangles.push_back({p00, p10, p11});
                        mesh.triangles.push_back({p00, p11, p01});
                    } else {
                        mesh.triangles.push_back({p00, p11, p10});
                        mesh.triangles.push_back({p00, p01, p11});
                    }
                }
    }
    return mesh;
}

} // namespace howire

#endif
