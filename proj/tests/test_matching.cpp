#include <gtest/gtest.h>

#include "howire/matching.hpp"
#include "howire/oracle.hpp"
#include "howire/rng.hpp"

using namespace howire;

TEST(Hungarian, SingleEntry) {
    const Assignment a = hungarian(CostMatrix{{3}});
    EXPECT_EQ(a.column_of_row, std::vector<long>{0});
    EXPECT_EQ(a.cost, 3);
}

TEST(Hungarian, IdentityCostIsZero) {
    const Assignment a = hungarian(CostMatrix{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    EXPECT_EQ(a.column_of_row, (std::vector<long>{0, 1, 2}));
    EXPECT_EQ(a.cost, 0);
}

TEST(Hungarian, ThreeByThree) {
    const Assignment a = hungarian(CostMatrix{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}});
    EXPECT_EQ(a.column_of_row, (std::vector<long>{1, 0, 2}));
    EXPECT_EQ(a.cost, 5);
}

TEST(Hungarian, MoreRowsThanColumns) {
    const CostMatrix m{{5}, {1}, {3}};
    const Assignment a = hungarian(m);
    EXPECT_EQ(a.column_of_row, (std::vector<long>{kUnassigned, 0, kUnassigned}));
    EXPECT_EQ(a.cost, 1);
    EXPECT_EQ(a.matched(), 1u);
}

TEST(Hungarian, EmptyMatrix) {
    EXPECT_EQ(hungarian(CostMatrix(0, 4)).matched(), 0u);
    EXPECT_EQ(hungarian(CostMatrix(2, 0)).column_of_row, (std::vector<long>{kUnassigned, kUnassigned}));
}

TEST(Hungarian, NonFiniteThrows) {
    CostMatrix m(2, 2, 1.0);
    m(1, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(hungarian(m), ValidationError);
    m(1, 0) = std::nan("");
    EXPECT_THROW(brute_force_matching(m), ValidationError);
}

TEST(BruteForce, WideRow) {
    const Assignment a = brute_force_matching(CostMatrix{{5, 2}});
    EXPECT_EQ(a.column_of_row, std::vector<long>{1});
    EXPECT_EQ(a.cost, 2);
}

TEST(BruteForce, TiesResolveLexicographically) {
    const Assignment a = brute_force_matching(CostMatrix(3, 3, 1.0));
    EXPECT_EQ(a.column_of_row, (std::vector<long>{0, 1, 2}));
    const Assignment tall = brute_force_matching(CostMatrix(3, 1, 1.0));
    EXPECT_EQ(tall.column_of_row, (std::vector<long>{kUnassigned, kUnassigned, 0}));
}

TEST(BruteForce, TooLargeThrows) { EXPECT_THROW(brute_force_matching(CostMatrix(9, 9, 0.0)), ValidationError); }

TEST(MatchingProperties, HungarianEqualsBruteForce) {
    Rng rng(77);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t r = 1 + rng.uniform_int(7), c = 1 + rng.uniform_int(7);
        CostMatrix m(r, c);
        const bool integer = trial % 2 == 0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                m(i, j) = integer ? static_cast<double>(rng.uniform_int(4)) : rng.uniform(-10, 10);
        const Assignment h = hungarian(m), b = brute_force_matching(m);
        ASSERT_NEAR(h.cost, b.cost, 1e-9) << trial;
        ASSERT_EQ(h.matched(), std::min(r, c));
        ASSERT_NEAR(assignment_cost(m, h.column_of_row), h.cost, 1e-9);
        std::set<long> cols;
        for (long col : h.column_of_row) {
            if (col != kUnassigned) {
                ASSERT_TRUE(cols.insert(col).second);
            }
        }
    }
}

TEST(MatchingProperties, ShiftInvariance) {
    Rng rng(78);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.uniform_int(6);
        CostMatrix m(n, n), shifted(n, n);
        const double k = rng.uniform(-50, 50);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) = rng.uniform(0, 10);
                shifted(i, j) = m(i, j) + k;
            }
        ASSERT_NEAR(hungarian(shifted).cost, hungarian(m).cost + static_cast<double>(n) * k, 1e-9);
    }
}

TEST(MatchingSweep, PassesAndDetectsFault) {
    MatchingSweepParams p;
    p.instances = 200;
    EXPECT_TRUE(matching_sweep(3, p).passed());
    const SweepReport bad = matching_sweep(3, p, OracleFault::hungarian_offset);
    EXPECT_FALSE(bad.passed());
    EXPECT_NE(bad.first_failure.find("["), std::string::npos);
}
