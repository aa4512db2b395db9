#include <gtest/gtest.h>

#include "howire/voxel.hpp"
#include "support.hpp"

using namespace howire;

namespace {

std::size_t junctions_of(const std::vector<Cell>& cells) {
    return build_solid(VoxelSolid::from_cells(cells)).wireframe.junction_count();
}

std::size_t lines_of(const std::vector<Cell>& cells) {
    return build_solid(VoxelSolid::from_cells(cells)).wireframe.lines.size();
}

/// Applies one of the 48 cube symmetries: axis permutation index 0..5, sign mask 0..7.
std::vector<Cell> apply_symmetry(const std::vector<Cell>& cells, int perm, int signs) {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<Cell> out;
    for (const Cell& c : cells) {
        Cell t;
        for (int a = 0; a < 3; ++a) t[a] = (signs >> a & 1) ? -c[perms[perm][a]] : c[perms[perm][a]];
        out.push_back(t);
    }
    return out;
}

} // namespace

TEST(BuildSolid, SingleCube) {
    EXPECT_EQ(junctions_of({{0, 0, 0}}), 8u);
    EXPECT_EQ(lines_of({{0, 0, 0}}), 12u);
}

TEST(BuildSolid, CoplanarFacesMerge) {
    EXPECT_EQ(junctions_of({{0, 0, 0}, {1, 0, 0}}), 8u);
    EXPECT_EQ(lines_of({{0, 0, 0}, {1, 0, 0}}), 12u);
    EXPECT_EQ(junctions_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), 8u);
}

TEST(BuildSolid, LTromino) {
    const std::vector<Cell> l{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    EXPECT_EQ(junctions_of(l), 12u);
    EXPECT_EQ(lines_of(l), 18u);
}

TEST(BuildSolid, CenteredAtOrigin) {
    const Solid s = build_solid(VoxelSolid::from_cells({{0, 0, 0}, {1, 0, 0}}));
    Vec3 sum;
    for (Vec3 v : s.wireframe.junctions3d) sum = sum + v;
    EXPECT_LT(norm(sum), 1e-12);
}

TEST(VoxelSolid, RejectsBadGrid) {
    EXPECT_THROW(VoxelSolid(0, 1, 1), ValidationError);
    EXPECT_THROW(VoxelSolid(9, 1, 1), ValidationError);
    EXPECT_THROW(VoxelSolid::from_cells({}), ValidationError);
}

TEST(VoxelSolid, Connectivity) {
    EXPECT_TRUE(VoxelSolid::from_cells({{0, 0, 0}, {1, 0, 0}}).is_connected());
    EXPECT_FALSE(VoxelSolid::from_cells({{0, 0, 0}, {2, 0, 0}}).is_connected());
}

TEST(VoxelSolid, EdgeContactIsNotManifold) {
    EXPECT_FALSE(boundary_is_manifold(VoxelSolid::from_cells({{0, 0, 0}, {1, 1, 0}})));
    EXPECT_FALSE(boundary_is_manifold(VoxelSolid::from_cells({{0, 0, 0}, {1, 1, 1}})));
    EXPECT_TRUE(boundary_is_manifold(VoxelSolid::from_cells({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}})));
}

TEST(CanonicalKey, InvariantUnderAllSymmetries) {
    const std::vector<Cell> shape{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {2, 0, 0}};
    const std::string key = canonical_key(VoxelSolid::from_cells(shape));
    std::set<std::string> keys;
    for (int p = 0; p < 6; ++p)
        for (int s = 0; s < 8; ++s) keys.insert(canonical_key(VoxelSolid::from_cells(apply_symmetry(shape, p, s))));
    EXPECT_EQ(keys, std::set<std::string>{key});
    EXPECT_NE(key, canonical_key(VoxelSolid::from_cells({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}})));
}

TEST(GeneratedSolids, DeterministicPerSeed) {
    for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
        const Solid a = generate_solid(seed), b = generate_solid(seed);
        EXPECT_EQ(a.key, b.key);
        EXPECT_EQ(a.wireframe.lines, b.wireframe.lines);
        EXPECT_EQ(a.mesh.triangles, b.mesh.triangles);
    }
}

TEST(GeneratedSolids, StructuralProperties) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const Solid s = generate_solid(seed);
        ASSERT_TRUE(s.voxels.is_connected()) << seed;
        ASSERT_TRUE(boundary_is_manifold(s.voxels)) << seed;
        const auto d = s.voxels.dims();
        ASSERT_GE(s.voxels.count(), static_cast<std::size_t>(std::min(2, d[0] * d[1] * d[2])));
        ASSERT_LE(s.voxels.count(), 6u);
        ASSERT_TRUE(s.mesh.is_watertight()) << seed;
        ASSERT_TRUE(validate(s.wireframe).empty()) << seed;
        const AdjacencyMatrix a = adjacency_matrix(s.wireframe);
        for (std::size_t r = 0; r < a.size(); ++r) {
            ASSERT_GE(a.row_sum(r), 3u) << seed;
            ASSERT_LE(a.row_sum(r), 6u) << seed;
        }
        // Euler characteristic of a genus-0 polyhedron surface, checked on the triangle mesh
        const long v = static_cast<long>(s.mesh.vertices.size()), f = static_cast<long>(s.mesh.size());
        ASSERT_EQ(v - f / 2, 2 - 0) << seed;
    }
}

TEST(GeneratedSolids, RespectsParams) {
    SolidGenParams p;
    p.min_voxels = 4;
    p.max_voxels = 4;
    p.grid_limits = {2, 2, 2};
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Solid s = generate_solid(seed, p);
        for (int d : s.voxels.dims()) ASSERT_LE(d, 2);
        ASSERT_LE(s.voxels.count(), 4u);
    }
    p.grid_limits = {0, 1, 1};
    EXPECT_THROW(generate_solid(1, p), ValidationError);
}
