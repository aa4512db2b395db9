#ifndef HOWIRE_TESTS_SUPPORT_HPP
#define HOWIRE_TESTS_SUPPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "howire/camera.hpp"
#include "howire/dataset.hpp"
#include "howire/rng.hpp"
#include "howire/voxel.hpp"
#include "howire/wireframe.hpp"

namespace test_support {

using namespace howire;

/// Fresh scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("howire_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline Vec3 random_vec(Rng& rng, double lo, double hi) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

/// Random simple graph: n junctions, each with at least one line, random visibility flags.
inline WireframeGraph random_graph(Rng& rng, std::size_t n) {
    WireframeGraph g;
    for (std::size_t i = 0; i < n; ++i) g.junctions3d.push_back(random_vec(rng, -1, 1) + Vec3{0, 0, 5});
    std::set<std::pair<std::size_t, std::size_t>> used;
    auto add = [&](std::size_t a, std::size_t b) {
        const Line l = make_line(a, b);
        if (a != b && used.insert({l.m, l.n}).second) g.lines.push_back(l);
    };
    for (std::size_t i = 1; i < n; ++i) add(i, rng.uniform_int(i));
    const std::size_t extra = rng.uniform_int(n + 1);
    for (std::size_t k = 0; k < extra; ++k) add(rng.uniform_int(n), rng.uniform_int(n));
    for (std::size_t i = 0; i < n; ++i) g.junction_visibility.push_back(rng.uniform() < 0.7 ? 1 : 0);
    return g;
}

inline CameraPose random_pose(Rng& rng) {
    const Vec3 eye = random_vec(rng, -5, 5);
    Vec3 target = random_vec(rng, -1, 1);
    if (norm(eye - target) < 0.5) target = eye + Vec3{1, 0, 0};
    Vec3 up = normalized(random_vec(rng, -1, 1) + Vec3{0, 0, 1e-3});
    if (norm(cross(normalized(target - eye), up)) < 0.1) up = Vec3{1, 0, 0};
    if (norm(cross(normalized(target - eye), up)) < 0.1) up = Vec3{0, 1, 0};
    return look_at(eye, target, up);
}

inline Solid unit_cube() { return build_solid(VoxelSolid::from_cells({{0, 0, 0}})); }

/// First accepted view of a solid over a seeded list of candidate viewpoints.
inline DataSample first_sample(const Solid& solid, std::uint64_t seed, const CameraIntrinsics& k = CameraIntrinsics::default_256()) {
    const auto [dmin, dmax] = framing_distance_range(bounding_radius(solid.mesh), k);
    for (const CameraPose& pose : sample_viewpoints(seed, 48, dmin, dmax)) {
        try {
            return make_sample(solid, pose, k);
        } catch (const RejectedView&) {
        }
    }
    throw std::runtime_error("no accepted view");
}

/// Small in-memory split: the first `count` samples produced for the given seed.
inline std::vector<DataSample> sample_split(std::uint64_t seed, std::size_t count, int solids = 4) {
    DatasetConfig cfg;
    cfg.seed = seed;
    cfg.solids = solids;
    GenerateSummary summary;
    std::vector<DataSample> out;
    for (auto& gs : generate_samples(cfg, summary))
        for (auto& s : gs.samples)
            if (out.size() < count) out.push_back(std::move(s));
    return out;
}

} // namespace test_support

#endif
