#ifndef HOWIRE_HIDDEN_JUNCTIONS_HPP
#define HOWIRE_HIDDEN_JUNCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "howire/error.hpp"
#include "howire/matching.hpp"
#include "howire/vec.hpp"

namespace howire {

/// Number of hidden-junction query slots.
inline constexpr std::size_t kHiddenSlots = 30;

/// One hidden-junction slot: image position (px), depth and confidence.
struct HiddenJunctionPrediction {
    double x = 0, y = 0, z = 0;
    double c = 0;
};

struct HiddenJunctionTarget {
    double x = 0, y = 0, z = 0;
};

struct LossWeights {
    double xy = 5.0;   // weight of the L1 image-position residual
    double z = 0.05;   // weight of the L1 depth residual
};

inline constexpr double kConfidenceClamp = 1e-7;

inline double clamp_confidence(double c) { return std::clamp(c, kConfidenceClamp, 1.0 - kConfidenceClamp); }

struct LossBreakdown {
    double total = 0;
    double classification = 0;
    double xy = 0;  // already multiplied by LossWeights::xy
    double z = 0;   // already multiplied by LossWeights::z
    Assignment matching;  // ground truth index -> slot index
};

/// Matching cost between a target and a slot: weighted geometric residual minus confidence.
inline double hidden_matching_cost(const HiddenJunctionTarget& gt, const HiddenJunctionPrediction& p,
                                   const LossWeights& w) {
    return w.xy * (std::abs(gt.x - p.x) + std::abs(gt.y - p.y)) + w.z * std::abs(gt.z - p.z) -
           clamp_confidence(p.c);
}

/// Set-prediction loss for the hidden-junction slots.
///
/// Targets are matched to slots by minimum-cost bipartite matching. Matched
/// slots pay -log(c) plus the weighted L1 residuals; unmatched slots pay
/// -log(1 - c). Sums are taken in a slot-order independent way (matched terms
/// in target order, unmatched terms sorted), so permuting slots leaves the
/// result bit-identical.
inline LossBreakdown hidden_junction_loss(std::span<const HiddenJunctionPrediction> slots,
                                          std::span<const HiddenJunctionTarget> targets,
                                          const LossWeights& weights = {}) {
    if (slots.size() < targets.size())
        throw ValidationError("hidden_junction_loss: fewer slots than ground-truth junctions");
    for (const auto& p : slots)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) || !std::isfinite(p.c))
            throw ValidationError("hidden_junction_loss: non-finite prediction");

    CostMatrix cost(targets.size(), slots.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = 0; j < slots.size(); ++j) cost(i, j) = hidden_matching_cost(targets[i], slots[j], weights);

    LossBreakdown out;
    out.matching = hungarian(cost);

    std::vector<char> matched(slots.size(), 0);
    double positive = 0.0, l1_xy = 0.0, l1_z = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& p = slots[static_cast<std::size_t>(out.matching.column_of_row[i])];
        matched[static_cast<std::size_t>(out.matching.column_of_row[i])] = 1;
        positive += -std::log(clamp_confidence(p.c));
        l1_xy += std::abs(targets[i].x - p.x) + std::abs(targets[i].y - p.y);
        l1_z += std::abs(targets[i].z - p.z);
    }
    std::vector<double> negatives;
    for (std::size_t j = 0; j < slots.size(); ++j)
        if (!matched[j]) negatives.push_back(-std::log(1.0 - clamp_confidence(slots[j].c)));
    std::sort(negatives.begin(), negatives.end());
    const double negative = std::accumulate(negatives.begin(), negatives.end(), 0.0);

    out.classification = positive + negative;
    out.xy = weights.xy * l1_xy;
    out.z = weights.z * l1_z;
    out.total = out.classification + out.xy + out.z;
    return out;
}

enum class ProposalMode { training, inference };

inline constexpr double kInferenceScoreThreshold = 0.5;

/// Endpoint of a hidden-line proposal: a hidden slot or a fleeting junction.
struct ProposalEndpoint {
    enum class Kind { hidden, fleeting } kind;
    std::size_t index;  // slot index (hidden) or fleeting-junction index

    friend bool operator==(const ProposalEndpoint&, const ProposalEndpoint&) = default;
};

struct LineProposal {
    ProposalEndpoint a;
    ProposalEndpoint b;

    friend bool operator==(const LineProposal&, const LineProposal&) = default;
};

/// Hidden slots that survive the mode's selection rule, in slot order.
///
/// Training keeps the top min(slots, 2 * n_gt_hidden) slots by confidence
/// (ties by slot index); inference drops slots scoring below 0.5.
inline std::vector<std::size_t> select_hidden_slots(std::span<const HiddenJunctionPrediction> hidden,
                                                    ProposalMode mode, std::size_t n_gt_hidden,
                                                    std::size_t slot_count = kHiddenSlots) {
    std::vector<std::size_t> keep(hidden.size());
    std::iota(keep.begin(), keep.end(), 0);
    if (mode == ProposalMode::training) {
        const std::size_t m = std::min({slot_count, 2 * n_gt_hidden, hidden.size()});
        std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return hidden[a].c > hidden[b].c; });
        keep.resize(m);
        std::sort(keep.begin(), keep.end());
    } else {
        std::erase_if(keep, [&](std::size_t i) { return hidden[i].c < kInferenceScoreThreshold; });
    }
    return keep;
}

/// All unordered pairs with at least one hidden endpoint: hidden-hidden then hidden-fleeting.
inline std::vector<LineProposal> enumerate_hidden_line_proposals(std::span<const HiddenJunctionPrediction> hidden,
                                                                 std::size_t fleeting_count, ProposalMode mode,
                                                                 std::size_t n_gt_hidden,
                                                                 std::size_t slot_count = kHiddenSlots) {
    const auto keep = select_hidden_slots(hidden, mode, n_gt_hidden, slot_count);
    using Kind = ProposalEndpoint::Kind;
    std::vector<LineProposal> out;
    out.reserve(keep.size() * (keep.size() - (keep.empty() ? 0 : 1)) / 2 + keep.size() * fleeting_count);
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = i + 1; j < keep.size(); ++j)
            out.push_back({{Kind::hidden, keep[i]}, {Kind::hidden, keep[j]}});
    for (std::size_t h : keep)
        for (std::size_t f = 0; f < fleeting_count; ++f) out.push_back({{Kind::hidden, h}, {Kind::fleeting, f}});
    return out;
}

/// Multi-channel feature map, channel-major; node (x, y) sits at pixel coordinate (x, y).
struct FeatureGrid {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    FeatureGrid() = default;
    FeatureGrid(int w, int h, int c = 1, double fill = 0.0)
        : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

    double at(int ch, int x, int y) const { return data[(static_cast<std::size_t>(ch) * height + y) * width + x]; }
    double& at(int ch, int x, int y) { return data[(static_cast<std::size_t>(ch) * height + y) * width + x]; }

    double bilinear(int ch, double x, double y) const {
        const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, width - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, height - 1);
        const int x1 = std::min(x0 + 1, width - 1), y1 = std::min(y0 + 1, height - 1);
        const double fx = x - x0, fy = y - y0;
        const double top = (1 - fx) * at(ch, x0, y0) + fx * at(ch, x1, y0);
        const double bottom = (1 - fx) * at(ch, x0, y1) + fx * at(ch, x1, y1);
        return (1 - fy) * top + fy * bottom;
    }
};

struct LoiFeatures {
    std::vector<double> values;  // point-major: n_points x channels
    bool clamped = false;        // an endpoint was outside the grid and got clamped
};

/// Samples n_points evenly along the segment (endpoints included) with bilinear interpolation.
inline LoiFeatures loi_sample(Vec2 a, Vec2 b, const FeatureGrid& grid, int n_points) {
    if (n_points < 2) throw ValidationError("loi_sample: need at least two points");
    if (grid.width < 1 || grid.height < 1) throw ValidationError("loi_sample: empty grid");
    LoiFeatures out;
    auto clamp_point = [&](Vec2 p) {
        const Vec2 q{std::clamp(p.x, 0.0, grid.width - 1.0), std::clamp(p.y, 0.0, grid.height - 1.0)};
        if (!(q == p)) out.clamped = true;
        return q;
    };
    a = clamp_point(a);
    b = clamp_point(b);
    out.values.reserve(static_cast<std::size_t>(n_points) * grid.channels);
    for (int i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / (n_points - 1);
        const Vec2 p = a + t * (b - a);
        for (int ch = 0; ch < grid.channels; ++ch) out.values.push_back(grid.bilinear(ch, p.x, p.y));
    }
    return out;
}

} // namespace howire

#endif
