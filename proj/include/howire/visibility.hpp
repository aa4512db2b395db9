#ifndef HOWIRE_VISIBILITY_HPP
#define HOWIRE_VISIBILITY_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "howire/error.hpp"
#include "howire/mesh.hpp"
#include "howire/vec.hpp"
#include "howire/wireframe.hpp"

namespace howire {

/// Tolerances for segment occlusion tests from the camera center.
struct OcclusionParams {
    double eps_t = 1e-6;     // ignore hits this close to the camera (segment parameter)
    double eps_self = 1e-6;  // ignore hits within this distance of the queried point (length units)

    /// eps_self scaled to 1e-4 of the mesh bounding-box diagonal.
    static OcclusionParams for_mesh(const TriangleMesh& mesh) {
        OcclusionParams p;
        p.eps_self = 1e-4 * mesh.bounds().diagonal();
        return p;
    }
};

inline constexpr double kGrazingDeterminant = 1e-12;

/// Moller-Trumbore intersection of the segment origin + t*dir against a triangle.
/// Edges are inclusive; near-parallel hits count as misses. Returns true iff
/// t_min < t < t_max.
inline bool segment_hits_triangle(Vec3 origin, Vec3 dir, Vec3 a, Vec3 b, Vec3 c, double t_min, double t_max) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = cross(dir, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < kGrazingDeterminant) return false;
    const double inv = 1.0 / det;
    const Vec3 s = origin - a;
    const double u = dot(s, p) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 q = cross(s, e1);
    const double v = dot(dir, q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    const double t = dot(e2, q) * inv;
    return t > t_min && t < t_max;
}

/// Parameter window (t_min, t_max) of the camera-to-point segment.
struct SegmentWindow {
    double t_min;
    double t_max;
};

inline SegmentWindow occlusion_window(Vec3 point, const OcclusionParams& params) {
    const double len = norm(point);
    if (!(len > 0.0)) throw GeometryError("occlusion test: point coincides with the camera center");
    return {params.eps_t, 1.0 - params.eps_self / len};
}

/// Anything that decides whether the segment from the camera center to a point is blocked.
template <class T>
concept Occluder = requires(const T& o, Vec3 p, const OcclusionParams& params) {
    { o.occluded(p, params) } -> std::convertible_to<bool>;
};

/// Tests the segment against every triangle.
class NaiveOccluder {
public:
    explicit NaiveOccluder(const TriangleMesh& mesh) : mesh_(&mesh) {}

    bool occluded(Vec3 point, const OcclusionParams& params) const {
        const SegmentWindow w = occlusion_window(point, params);
        const Vec3 origin{};
        for (std::size_t t = 0; t < mesh_->size(); ++t) {
            const auto [a, b, c] = mesh_->corners(t);
            if (segment_hits_triangle(origin, point, a, b, c, w.t_min, w.t_max)) return true;
        }
        return false;
    }

private:
    const TriangleMesh* mesh_;
};

/// Occlusion of the camera-frame point by the camera-frame mesh; the camera sits at the origin.
inline bool ray_occlusion_test(Vec3 point_camera, const TriangleMesh& mesh_camera, const OcclusionParams& params) {
    if (!(point_camera.z > 0.0) && norm(point_camera) > 0.0)
        throw GeometryError("occlusion test: point is not in front of the camera");
    return NaiveOccluder(mesh_camera).occluded(point_camera, params);
}

/// Axis-aligned bounding-volume hierarchy over the triangles of a mesh.
///
/// Built by median split of triangle centroids along the longest axis of the
/// centroid bounds. Node boxes are padded slightly so box rejection never
/// discards a triangle the exact triangle test would accept; queries through
/// the tree therefore return exactly what NaiveOccluder returns.
class BvhAccelerator {
public:
    struct Node {
        Bounds box;
        std::uint32_t first = 0;  // leaf: offset into order(); inner: index of left child
        std::uint32_t count = 0;  // leaf: triangle count; inner: 0
        std::uint32_t right = 0;  // inner: index of right child

        bool leaf() const { return count > 0; }
    };

    explicit BvhAccelerator(const TriangleMesh& mesh, std::uint32_t leaf_size = 4)
        : mesh_(&mesh), leaf_size_(std::max<std::uint32_t>(1, leaf_size)) {
        if (mesh.empty()) return;
        const Bounds all = mesh.bounds();
        pad_ = 1e-9 * std::max(1.0, all.diagonal());
        order_.resize(mesh.size());
        std::iota(order_.begin(), order_.end(), 0u);
        centroids_.reserve(mesh.size());
        for (std::size_t t = 0; t < mesh.size(); ++t) {
            const auto [a, b, c] = mesh.corners(t);
            centroids_.push_back((a + b + c) / 3.0);
        }
        nodes_.reserve(2 * mesh.size() / leaf_size_ + 1);
        build(0, static_cast<std::uint32_t>(mesh.size()));
        centroids_.clear();
        centroids_.shrink_to_fit();
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::uint32_t>& order() const { return order_; }
    std::uint32_t leaf_size() const { return leaf_size_; }

    bool occluded(Vec3 point, const OcclusionParams& params) const {
        if (nodes_.empty()) return false;
        const SegmentWindow w = occlusion_window(point, params);
        const Vec3 origin{};
        std::uint32_t stack[64];
        int top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes_[stack[--top]];
            if (!segment_overlaps_box(origin, point, w.t_max, node.box)) continue;
            if (node.leaf()) {
                for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                    const auto [a, b, c] = mesh_->corners(order_[i]);
                    if (segment_hits_triangle(origin, point, a, b, c, w.t_min, w.t_max)) return true;
                }
            } else {
                stack[top++] = node.right;
                stack[top++] = node.first;
            }
        }
        return false;
    }

    /// Checks the structural invariants: each triangle in exactly one leaf,
    /// every parent box contains its children and every leaf box its triangles.
    bool check_invariants() const {
        if (mesh_->empty()) return nodes_.empty();
        std::vector<int> seen(mesh_->size(), 0);
        for (const Node& n : nodes_) {
            if (n.leaf()) {
                for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                    ++seen[order_[i]];
                    if (!n.box.contains(mesh_->triangle_bounds(order_[i]))) return false;
                }
            } else if (!n.box.contains(nodes_[n.first].box) || !n.box.contains(nodes_[n.right].box)) {
                return false;
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
    }

private:
    std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
        const auto index = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        Bounds box, centroid_box;
        for (std::uint32_t i = begin; i < end; ++i) {
            box.expand(mesh_->triangle_bounds(order_[i]));
            centroid_box.expand(centroids_[order_[i]]);
        }
        box.lo = box.lo - Vec3{pad_, pad_, pad_};
        box.hi = box.hi + Vec3{pad_, pad_, pad_};
        nodes_[index].box = box;

        const std::uint32_t count = end - begin;
        if (count <= leaf_size_) {
            nodes_[index].first = begin;
            nodes_[index].count = count;
            return index;
        }
        const int axis = centroid_box.longest_axis();
        const std::uint32_t mid = begin + count / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             const double ca = centroids_[a][axis], cb = centroids_[b][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
        const std::uint32_t left = build(begin, mid);
        const std::uint32_t right = build(mid, end);
        nodes_[index].first = left;
        nodes_[index].right = right;
        nodes_[index].count = 0;
        return index;
    }

    static bool segment_overlaps_box(Vec3 origin, Vec3 dir, double t_max, const Bounds& box) {
        double lo = 0.0, hi = t_max;
        for (int axis = 0; axis < 3; ++axis) {
            const double o = origin[axis], d = dir[axis];
            if (d == 0.0) {
                if (o < box.lo[axis] || o > box.hi[axis]) return false;
                continue;
            }
            double t0 = (box.lo[axis] - o) / d;
            double t1 = (box.hi[axis] - o) / d;
            if (t0 > t1) std::swap(t0, t1);
            lo = std::max(lo, t0);
            hi = std::min(hi, t1);
            if (lo > hi) return false;
        }
        return true;
    }

    const TriangleMesh* mesh_;
    std::uint32_t leaf_size_;
    double pad_ = 0.0;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<Vec3> centroids_;
};

inline BvhAccelerator build_bvh(const TriangleMesh& mesh, std::uint32_t leaf_size = 4) {
    return BvhAccelerator(mesh, leaf_size);
}

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
inline Vec3 closest_point_on_triangle(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0) return a;
    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    const double denom = 1.0 / (va + vb + vc);
    return a + (vb * denom) * ab + (vc * denom) * ac;
}

inline double distance_to_mesh(Vec3 p, const TriangleMesh& mesh) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh.size(); ++t) {
        const auto [a, b, c] = mesh.corners(t);
        best = std::min(best, norm(p - closest_point_on_triangle(p, a, b, c)));
    }
    return best;
}

struct VisibilityResult {
    std::vector<std::uint8_t> junction_visibility;
    std::vector<std::string> warnings;
};

/// Visibility flag per junction (1 = unoccluded); warns about junctions not on the surface.
template <Occluder O>
VisibilityResult label_junction_visibility(const WireframeGraph& graph_camera, const TriangleMesh& mesh_camera,
                                           const O& occluder, const OcclusionParams& params) {
    VisibilityResult out;
    out.junction_visibility.reserve(graph_camera.junction_count());
    for (std::size_t j = 0; j < graph_camera.junction_count(); ++j) {
        const Vec3 p = graph_camera.junctions3d[j];
        if (!(p.z > 0.0)) throw GeometryError("junction " + std::to_string(j) + " is behind the camera");
        out.junction_visibility.push_back(occluder.occluded(p, params) ? 0 : 1);
        if (!mesh_camera.empty() && distance_to_mesh(p, mesh_camera) > 10.0 * params.eps_self)
            out.warnings.push_back("junction " + std::to_string(j) + " lies off the mesh surface");
    }
    return out;
}

inline VisibilityResult label_junction_visibility(const WireframeGraph& graph_camera,
                                                  const TriangleMesh& mesh_camera) {
    return label_junction_visibility(graph_camera, mesh_camera, BvhAccelerator(mesh_camera),
                                     OcclusionParams::for_mesh(mesh_camera));
}

} // namespace howire

#endif
