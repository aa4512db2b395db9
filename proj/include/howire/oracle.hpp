#ifndef HOWIRE_ORACLE_HPP
#define HOWIRE_ORACLE_HPP

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "howire/dataset.hpp"
#include "howire/matching.hpp"
#include "howire/mesh.hpp"
#include "howire/rng.hpp"
#include "howire/visibility.hpp"
#include "howire/voxel.hpp"

namespace howire {

/// Deliberate defects for negative-control runs of the sweeps.
enum class OracleFault {
    none,
    bvh_drop_triangles,   // accelerator built over every other triangle only
    hungarian_offset,     // reported hungarian cost shifted by a tiny amount
};

inline std::optional<OracleFault> parse_oracle_fault(std::string_view s) {
    if (s == "none") return OracleFault::none;
    if (s == "bvh") return OracleFault::bvh_drop_triangles;
    if (s == "hungarian") return OracleFault::hungarian_offset;
    return std::nullopt;
}

struct SweepReport {
    std::size_t instances = 0;
    std::size_t comparisons = 0;
    std::size_t mismatches = 0;
    std::string first_failure;  // dump of the first mismatching instance
    double seconds = 0.0;

    bool passed() const { return mismatches == 0; }
};

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct MatchingSweepParams {
    std::size_t instances = 1000;
    std::size_t max_side = 7;
    double max_entry = 10.0;
};

inline std::string dump_matrix(const CostMatrix& m) {
    std::string out = "[";
    char buf[40];
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += r ? ",\n [" : "[";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%s%.17g", c ? ", " : "", m(r, c));
            out += buf;
        }
        out += "]";
    }
    return out + "]";
}

/// Hungarian vs exhaustive search on random matrices with 1..max_side rows and columns.
inline SweepReport matching_sweep(std::uint64_t seed, const MatchingSweepParams& params = {},
                                  OracleFault fault = OracleFault::none) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(mix_seed(seed, 0xA551'6E00ull));
    SweepReport report;
    for (std::size_t i = 0; i < params.instances; ++i) {
        const std::size_t rows = 1 + rng.uniform_int(params.max_side);
        const std::size_t cols = 1 + rng.uniform_int(params.max_side);
        CostMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(0.0, params.max_entry);
        double fast = hungarian(m).cost;
        if (fault == OracleFault::hungarian_offset) fast += 1e-9;
        const double exact = brute_force_matching(m).cost;
        ++report.instances;
        ++report.comparisons;
        if (fast != exact) {
            if (report.mismatches++ == 0) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "instance %zu (%zux%zu): hungarian %.17g, brute force %.17g\n", i, rows,
                              cols, fast, exact);
                report.first_failure = buf + dump_matrix(m);
            }
        }
    }
    report.seconds = seconds_since(start);
    return report;
}

struct VisibilitySweepParams {
    std::size_t solids = 50;
    int views = 24;
    SolidGenParams solid{};
    CameraIntrinsics intrinsics = CameraIntrinsics::default_256();
};

namespace detail {

inline TriangleMesh every_other_triangle(const TriangleMesh& mesh) {
    TriangleMesh out;
    out.vertices = mesh.vertices;
    for (std::size_t t = 0; t < mesh.size(); t += 2) out.triangles.push_back(mesh.triangles[t]);
    return out;
}

} // namespace detail

/// BVH vs naive occlusion for every junction of generated solids seen from sampled viewpoints.
///
/// Every sampled view is used, including ones the dataset filter would
/// reject; only junctions behind the camera are skipped.
inline SweepReport visibility_sweep(std::uint64_t seed, const VisibilitySweepParams& params = {},
                                    OracleFault fault = OracleFault::none) {
    const auto start = std::chrono::steady_clock::now();
    SweepReport report;
    for (std::size_t s = 0; s < params.solids; ++s) {
        const std::uint64_t solid_seed = mix_seed(seed, 0xB0C5'0000ull + s);
        const Solid solid = generate_solid(solid_seed, params.solid);
        const auto [dmin, dmax] = framing_distance_range(bounding_radius(solid.mesh), params.intrinsics);
        const auto poses = sample_viewpoints(mix_seed(solid_seed, 1), params.views, dmin, dmax);
        for (std::size_t v = 0; v < poses.size(); ++v) {
            const TriangleMesh mesh = transform_mesh(solid.mesh, poses[v]);
            const TriangleMesh accel_mesh = fault == OracleFault::bvh_drop_triangles ? detail::every_other_triangle(mesh) : mesh;
            const BvhAccelerator bvh(accel_mesh);
            const NaiveOccluder naive(mesh);
            const OcclusionParams eps = OcclusionParams::for_mesh(mesh);
            ++report.instances;
            for (std::size_t j = 0; j < solid.wireframe.junction_count(); ++j) {
                const Vec3 p = poses[v].apply(solid.wireframe.junctions3d[j]);
                if (!(p.z > 0.0)) continue;
                const bool fast = bvh.occluded(p, eps);
                const bool exact = naive.occluded(p, eps);
                ++report.comparisons;
                if (fast != exact && report.mismatches++ == 0) {
                    char buf[256];
                    std::snprintf(buf, sizeof buf,
                                  "solid %zu (seed %llu, key %s) view %zu junction %zu at camera (%.17g, %.17g, %.17g): "
                                  "bvh %s, naive %s",
                                  s, static_cast<unsigned long long>(solid_seed), solid.key.substr(0, 24).c_str(), v, j,
                                  p.x, p.y, p.z, fast ? "occluded" : "visible", exact ? "occluded" : "visible");
                    report.first_failure = buf;
                }
            }
        }
    }
    report.seconds = seconds_since(start);
    return report;
}

struct SpeedupReport {
    std::size_t triangles = 0;
    std::size_t queries = 0;
    double naive_seconds = 0.0;
    double bvh_seconds = 0.0;
    std::size_t disagreements = 0;
    std::size_t occluded = 0;

    double speedup() const { return bvh_seconds > 0 ? naive_seconds / bvh_seconds : 0.0; }
};

/// Times naive and BVH occlusion on a subdivided box seen from the origin.
///
/// Query points lie on the box surface, so roughly half are occluded by the
/// near faces. BVH construction is excluded from the timing.
inline SpeedupReport occlusion_speedup(std::uint64_t seed, int subdivisions = 29, std::size_t queries = 1000,
                                       int repeats = 3) {
    const Vec3 lo{-1.0, -0.8, 4.0}, hi{1.2, 0.9, 6.0};
    const TriangleMesh mesh = subdivided_box(lo, hi, subdivisions);
    Rng rng(mix_seed(seed, 0x5BEEDull));
    std::vector<Vec3> points;
    points.reserve(queries);
    for (std::size_t i = 0; i < queries; ++i) {
        Vec3 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
        const int axis = static_cast<int>(rng.uniform_int(3));
        p[axis] = rng.uniform_int(2) ? hi[axis] : lo[axis];
        points.push_back(p);
    }
    const OcclusionParams eps = OcclusionParams::for_mesh(mesh);
    const NaiveOccluder naive(mesh);
    const BvhAccelerator bvh(mesh);

    SpeedupReport out;
    out.triangles = mesh.size();
    out.queries = queries;
    std::vector<char> naive_result(queries), bvh_result(queries);
    double best_naive = 1e300, best_bvh = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < queries; ++i) naive_result[i] = naive.occluded(points[i], eps);
        best_naive = std::min(best_naive, seconds_since(t0));
        t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < queries; ++i) bvh_result[i] = bvh.occluded(points[i], eps);
        best_bvh = std::min(best_bvh, seconds_since(t0));
    }
    out.naive_seconds = best_naive;
    out.bvh_seconds = best_bvh;
    for (std::size_t i = 0; i < queries; ++i) {
        out.disagreements += naive_result[i] != bvh_result[i] ? 1 : 0;
        out.occluded += naive_result[i] ? 1 : 0;
    }
    return out;
}

} // namespace howire

#endif
