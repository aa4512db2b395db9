#include <gtest/gtest.h>

#include "howire/hidden_junctions.hpp"
#include "howire/rng.hpp"

using namespace howire;

namespace {

using Slots = std::vector<HiddenJunctionPrediction>;
using Targets = std::vector<HiddenJunctionTarget>;

Slots padded(Slots s, std::size_t n = kHiddenSlots) {
    while (s.size() < n) s.push_back({0, 0, 0, kConfidenceClamp});
    return s;
}

} // namespace

TEST(HiddenLoss, WorkedExample) {
    const Slots slots{{12, 19, 0.7, 0.8}, {0, 0, 0, 1e-7}};
    const LossBreakdown l = hidden_junction_loss(slots, Targets{{10, 20, 0.5}});
    EXPECT_NEAR(l.total, 15.2331, 1e-3);
    EXPECT_NEAR(l.xy, 15.0, 1e-12);
    EXPECT_NEAR(l.z, 0.01, 1e-12);
    EXPECT_EQ(l.matching.column_of_row, std::vector<long>{0});
}

TEST(HiddenLoss, PerfectPredictionsNearZero) {
    Rng rng(1);
    Targets gts;
    Slots slots;
    for (int i = 0; i < 12; ++i) {
        gts.push_back({rng.uniform(0, 256), rng.uniform(0, 256), rng.uniform(1, 10)});
        slots.push_back({gts.back().x, gts.back().y, gts.back().z, 1.0});
    }
    const LossBreakdown l = hidden_junction_loss(padded(slots), gts);
    EXPECT_LE(l.total, 1e-5 * kHiddenSlots);
}

TEST(HiddenLoss, NoTargetsAllNegative) {
    const LossBreakdown l = hidden_junction_loss(padded({}), Targets{});
    EXPECT_NEAR(l.total, 0.0, 1e-4);
    EXPECT_EQ(l.xy, 0.0);
}

TEST(HiddenLoss, TooFewSlotsThrows) {
    EXPECT_THROW(hidden_junction_loss(Slots{{0, 0, 0, 0.5}}, Targets{{1, 1, 1}, {2, 2, 2}}), ValidationError);
    EXPECT_THROW(hidden_junction_loss(Slots{{0, std::nan(""), 0, 0.5}}, Targets{}), ValidationError);
}

TEST(HiddenLoss, ConfidenceIsClamped) {
    const LossBreakdown l = hidden_junction_loss(Slots{{10, 20, 0.5, 0.0}}, Targets{{10, 20, 0.5}});
    EXPECT_NEAR(l.total, -std::log(kConfidenceClamp), 1e-9);
    EXPECT_TRUE(std::isfinite(hidden_junction_loss(Slots{{0, 0, 0, 1.0}}, Targets{}).total));
}

TEST(HiddenLoss, PermutationInvariance) {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        Targets gts;
        for (std::size_t i = 0, n = rng.uniform_int(10); i < n; ++i)
            gts.push_back({rng.uniform(0, 256), rng.uniform(0, 256), rng.uniform(1, 10)});
        Slots slots;
        for (std::size_t i = 0; i < kHiddenSlots; ++i)
            slots.push_back({rng.uniform(0, 256), rng.uniform(0, 256), rng.uniform(1, 10), rng.uniform()});
        const double base = hidden_junction_loss(slots, gts).total;
        for (int p = 0; p < 5; ++p) {
            for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng.uniform_int(i)]);
            ASSERT_EQ(hidden_junction_loss(slots, gts).total, base);
        }
    }
}

TEST(HiddenLoss, MovingAwayIncreasesXyTerm) {
    const Targets gt{{100, 100, 3}};
    double previous = -1;
    for (double d = 0; d <= 20; d += 2) {
        const LossBreakdown l = hidden_junction_loss(Slots{{100 + d, 100 - d, 3, 0.9}}, gt);
        EXPECT_GT(l.xy, previous);
        EXPECT_NEAR(l.xy, 5.0 * 2 * d, 1e-9);
        previous = l.xy;
    }
}

TEST(HiddenLoss, MatchingPrefersCloserSlot) {
    const Slots slots{{50, 50, 2, 0.9}, {10, 10, 2, 0.9}};
    const LossBreakdown l = hidden_junction_loss(slots, Targets{{11, 10, 2}});
    EXPECT_EQ(l.matching.column_of_row, std::vector<long>{1});
}

TEST(Proposals, TrainingKeepsTopTwiceGroundTruth) {
    Slots slots(kHiddenSlots, {0, 0, 0, 0.1});
    slots[4].c = 0.9;
    slots[17].c = 0.8;
    slots[2].c = 0.1;
    EXPECT_EQ(select_hidden_slots(slots, ProposalMode::training, 1), (std::vector<std::size_t>{4, 17}));
    const auto proposals = enumerate_hidden_line_proposals(slots, 3, ProposalMode::training, 1);
    ASSERT_EQ(proposals.size(), 7u);
    using K = ProposalEndpoint::Kind;
    EXPECT_EQ(proposals[0], (LineProposal{{K::hidden, 4}, {K::hidden, 17}}));
    EXPECT_EQ(proposals[1], (LineProposal{{K::hidden, 4}, {K::fleeting, 0}}));
}

TEST(Proposals, TrainingCapsAtSlotCount) {
    Slots slots(kHiddenSlots, {0, 0, 0, 0.5});
    EXPECT_EQ(select_hidden_slots(slots, ProposalMode::training, 20).size(), kHiddenSlots);
    EXPECT_EQ(select_hidden_slots(slots, ProposalMode::training, 4).size(), 8u);
    EXPECT_TRUE(enumerate_hidden_line_proposals(slots, 5, ProposalMode::training, 0).empty());
}

TEST(Proposals, InferenceThreshold) {
    Slots slots(6, {0, 0, 0, 0.2});
    slots[1].c = 0.5;
    slots[3].c = 0.49999;
    slots[5].c = 0.97;
    EXPECT_EQ(select_hidden_slots(slots, ProposalMode::inference, 0), (std::vector<std::size_t>{1, 5}));
    EXPECT_EQ(enumerate_hidden_line_proposals(slots, 2, ProposalMode::inference, 0).size(), 1u + 4u);
}

TEST(Proposals, NoFleetingLinesAmongFleetingJunctions) {
    Slots slots(3, {0, 0, 0, 0.9});
    for (const auto& p : enumerate_hidden_line_proposals(slots, 4, ProposalMode::inference, 0))
        EXPECT_EQ(p.a.kind, ProposalEndpoint::Kind::hidden);
}

TEST(LineOfInterest, ConstantGrid) {
    const FeatureGrid grid(8, 8, 2, 3.5);
    const LoiFeatures f = loi_sample({1, 1}, {6, 5}, grid, 4);
    ASSERT_EQ(f.values.size(), 8u);
    for (double v : f.values) EXPECT_EQ(v, 3.5);
    EXPECT_FALSE(f.clamped);
}

TEST(LineOfInterest, NodesReturnStoredValues) {
    FeatureGrid grid(4, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) grid.at(0, x, y) = 10 * y + x;
    const LoiFeatures f = loi_sample({0, 0}, {3, 2}, grid, 2);
    EXPECT_EQ(f.values, (std::vector<double>{0, 23}));
}

TEST(LineOfInterest, LinearRamp) {
    FeatureGrid grid(11, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 11; ++x) grid.at(0, x, y) = x;
    const LoiFeatures f = loi_sample({0, 0.5}, {10, 0.5}, grid, 5);
    ASSERT_EQ(f.values.size(), 5u);
    const std::vector<double> expected{0, 2.5, 5, 7.5, 10};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(f.values[i], expected[i], 1e-12);
}

TEST(LineOfInterest, OutOfGridClamps) {
    const FeatureGrid grid(4, 4, 1, 1.0);
    EXPECT_TRUE(loi_sample({-3, 1}, {2, 2}, grid, 3).clamped);
    EXPECT_THROW(loi_sample({0, 0}, {1, 1}, grid, 1), ValidationError);
}
