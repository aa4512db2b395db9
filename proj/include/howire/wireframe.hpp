#ifndef HOWIRE_WIREFRAME_HPP
#define HOWIRE_WIREFRAME_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "howire/error.hpp"
#include "howire/vec.hpp"

namespace howire {

enum class JunctionClass : std::uint8_t { visible, fleeting, hidden };
enum class LineVisibility : std::uint8_t { visible, hidden };

inline std::string_view to_string(JunctionClass c) {
    switch (c) {
    case JunctionClass::visible: return "visible";
    case JunctionClass::fleeting: return "fleeting";
    case JunctionClass::hidden: return "hidden";
    }
    return "?";
}

inline std::string_view to_string(LineVisibility v) {
    return v == LineVisibility::visible ? "visible" : "hidden";
}

inline std::optional<JunctionClass> parse_junction_class(std::string_view s) {
    if (s == "visible") return JunctionClass::visible;
    if (s == "fleeting") return JunctionClass::fleeting;
    if (s == "hidden") return JunctionClass::hidden;
    return std::nullopt;
}

inline std::optional<LineVisibility> parse_line_visibility(std::string_view s) {
    if (s == "visible") return LineVisibility::visible;
    if (s == "hidden") return LineVisibility::hidden;
    return std::nullopt;
}

/// Undirected line segment between two junction indices.
struct Line {
    std::size_t m = 0;
    std::size_t n = 0;

    friend constexpr bool operator==(const Line&, const Line&) = default;
};

/// Canonical form with the lower index first.
constexpr Line make_line(std::size_t a, std::size_t b) { return a < b ? Line{a, b} : Line{b, a}; }

/// Junctions, line index set and visibility labels of one wireframe.
///
/// The label vectors are either empty (not yet labeled) or sized to match
/// the junction / line counts.
struct WireframeGraph {
    std::vector<Vec3> junctions3d;
    std::vector<Vec2> junctions2d;  // optional, derivable by projection
    std::vector<Line> lines;
    std::vector<std::uint8_t> junction_visibility;
    std::vector<JunctionClass> junction_class;
    std::vector<LineVisibility> line_visibility;

    std::size_t junction_count() const { return junctions3d.size(); }
    bool labeled() const { return !junction_visibility.empty() || junctions3d.empty(); }
};

/// Binary symmetric adjacency over junction indices.
class AdjacencyMatrix {
public:
    explicit AdjacencyMatrix(std::size_t n) : n_(n), entries_(n * n, 0) {}

    std::size_t size() const { return n_; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }
    void set(std::size_t r, std::size_t c) { entries_[r * n_ + c] = 1; entries_[c * n_ + r] = 1; }
    std::size_t nonzero_count() const {
        return static_cast<std::size_t>(std::count(entries_.begin(), entries_.end(), std::uint8_t{1}));
    }
    std::size_t row_sum(std::size_t r) const {
        std::size_t s = 0;
        for (std::size_t c = 0; c < n_; ++c) s += entries_[r * n_ + c];
        return s;
    }

private:
    std::size_t n_;
    std::vector<std::uint8_t> entries_;
};

enum class ViolationKind {
    index_out_of_range,
    self_loop,
    duplicate_edge,
    zero_length,
    isolated_junction,
    size_mismatch,
    class_visibility_mismatch,
    line_label_mismatch,
    fleeting_mismatch,
};

struct Violation {
    ViolationKind kind;
    std::vector<std::size_t> indices;  // offending junction or line indices
    std::string message;
};

/// Minimum Euclidean length of a line; shorter lines are degenerate.
inline constexpr double kMinLineLength = 1e-9;

inline void check_line_indices(std::span<const Line> lines, std::size_t junctions) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].m >= junctions || lines[i].n >= junctions)
            throw ValidationError("line " + std::to_string(i) + " references junction out of range (" +
                                  std::to_string(junctions) + " junctions)");
    }
}

/// A line is hidden iff at least one of its endpoints is not visible.
inline std::vector<LineVisibility> classify_line_visibility(std::span<const Line> lines,
                                                            std::span<const std::uint8_t> junction_visibility) {
    check_line_indices(lines, junction_visibility.size());
    std::vector<LineVisibility> out;
    out.reserve(lines.size());
    for (const Line& l : lines) {
        const bool hidden = junction_visibility[l.m] == 0 || junction_visibility[l.n] == 0;
        out.push_back(hidden ? LineVisibility::hidden : LineVisibility::visible);
    }
    return out;
}

/// v=0 gives hidden; v=1 with an incident hidden line gives fleeting; otherwise visible.
inline std::vector<JunctionClass> classify_junctions(std::span<const std::uint8_t> junction_visibility,
                                                     std::span<const LineVisibility> line_visibility,
                                                     std::span<const Line> lines) {
    if (line_visibility.size() != lines.size())
        throw ValidationError("line_visibility has " + std::to_string(line_visibility.size()) + " entries for " +
                              std::to_string(lines.size()) + " lines");
    check_line_indices(lines, junction_visibility.size());

    std::vector<JunctionClass> out(junction_visibility.size(), JunctionClass::visible);
    for (std::size_t j = 0; j < junction_visibility.size(); ++j)
        if (junction_visibility[j] == 0) out[j] = JunctionClass::hidden;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const Line& l = lines[i];
        const bool any_hidden = junction_visibility[l.m] == 0 || junction_visibility[l.n] == 0;
        if ((line_visibility[i] == LineVisibility::hidden) != any_hidden)
            throw ValidationError("line " + std::to_string(i) + " label contradicts endpoint visibility");
        if (line_visibility[i] == LineVisibility::hidden) {
            for (std::size_t j : {l.m, l.n})
                if (junction_visibility[j] != 0) out[j] = JunctionClass::fleeting;
        }
    }
    return out;
}

/// Fills line_visibility and junction_class from junction_visibility.
inline void assign_labels(WireframeGraph& g) {
    if (g.junction_visibility.size() != g.junctions3d.size())
        throw ValidationError("junction_visibility size does not match junction count");
    g.line_visibility = classify_line_visibility(g.lines, g.junction_visibility);
    g.junction_class = classify_junctions(g.junction_visibility, g.line_visibility, g.lines);
}

inline AdjacencyMatrix adjacency_matrix(const WireframeGraph& g) {
    check_line_indices(g.lines, g.junction_count());
    AdjacencyMatrix a(g.junction_count());
    for (const Line& l : g.lines) {
        if (l.m == l.n) throw ValidationError("self-loop at junction " + std::to_string(l.m));
        a.set(l.m, l.n);
    }
    return a;
}

/// Reports every violated invariant; an empty result means the graph is valid.
inline std::vector<Violation> validate(const WireframeGraph& g) {
    std::vector<Violation> out;
    const std::size_t nj = g.junction_count();
    auto report = [&](ViolationKind k, std::vector<std::size_t> idx, std::string msg) {
        out.push_back({k, std::move(idx), std::move(msg)});
    };

    if (!g.junctions2d.empty() && g.junctions2d.size() != nj)
        report(ViolationKind::size_mismatch, {}, "junctions2d size differs from junctions3d");

    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::size_t> degree(nj, 0);
    bool indices_ok = true;
    for (std::size_t i = 0; i < g.lines.size(); ++i) {
        const Line& l = g.lines[i];
        if (l.m >= nj || l.n >= nj) {
            report(ViolationKind::index_out_of_range, {i}, "line " + std::to_string(i) + " index out of range");
            indices_ok = false;
            continue;
        }
        if (l.m == l.n) {
            report(ViolationKind::self_loop, {i}, "line " + std::to_string(i) + " is a self-loop");
            continue;
        }
        if (!seen.insert({std::min(l.m, l.n), std::max(l.m, l.n)}).second)
            report(ViolationKind::duplicate_edge, {i}, "line " + std::to_string(i) + " duplicates an earlier line");
        if (norm(g.junctions3d[l.m] - g.junctions3d[l.n]) < kMinLineLength)
            report(ViolationKind::zero_length, {i}, "line " + std::to_string(i) + " has zero length");
        ++degree[l.m];
        ++degree[l.n];
    }
    for (std::size_t j = 0; j < nj; ++j)
        if (degree[j] == 0)
            report(ViolationKind::isolated_junction, {j}, "junction " + std::to_string(j) + " has no incident line");

    if (g.junction_visibility.empty()) return out;
    if (g.junction_visibility.size() != nj) {
        report(ViolationKind::size_mismatch, {}, "junction_visibility size differs from junction count");
        return out;
    }
    if (!indices_ok) return out;

    const auto expected_lines = classify_line_visibility(g.lines, g.junction_visibility);
    if (!g.line_visibility.empty()) {
        if (g.line_visibility.size() != g.lines.size()) {
            report(ViolationKind::size_mismatch, {}, "line_visibility size differs from line count");
        } else {
            for (std::size_t i = 0; i < g.lines.size(); ++i)
                if (g.line_visibility[i] != expected_lines[i])
                    report(ViolationKind::line_label_mismatch, {i},
                           "line " + std::to_string(i) + " label contradicts endpoint visibility");
        }
    }
    if (!g.junction_class.empty()) {
        if (g.junction_class.size() != nj) {
            report(ViolationKind::size_mismatch, {}, "junction_class size differs from junction count");
            return out;
        }
        const auto expected = classify_junctions(g.junction_visibility, expected_lines, g.lines);
        for (std::size_t j = 0; j < nj; ++j) {
            const bool hidden_label = g.junction_class[j] == JunctionClass::hidden;
            if (hidden_label != (g.junction_visibility[j] == 0))
                report(ViolationKind::class_visibility_mismatch, {j},
                       "junction " + std::to_string(j) + " class contradicts its visibility flag");
            else if (g.junction_class[j] != expected[j])
                report(ViolationKind::fleeting_mismatch, {j},
                       "junction " + std::to_string(j) + " fleeting label contradicts incident hidden lines");
        }
    }
    return out;
}

struct LabelCounts {
    std::size_t junctions_visible = 0;
    std::size_t junctions_fleeting = 0;
    std::size_t junctions_hidden = 0;
    std::size_t lines_visible = 0;
    std::size_t lines_hidden = 0;

    /// Observable junctions (v = 1), i.e. visible plus fleeting.
    std::size_t junctions_observable() const { return junctions_visible + junctions_fleeting; }
};

inline LabelCounts count_labels(const WireframeGraph& g) {
    LabelCounts c;
    for (JunctionClass k : g.junction_class) {
        if (k == JunctionClass::visible) ++c.junctions_visible;
        else if (k == JunctionClass::fleeting) ++c.junctions_fleeting;
        else ++c.junctions_hidden;
    }
    for (LineVisibility v : g.line_visibility) {
        if (v == LineVisibility::visible) ++c.lines_visible;
        else ++c.lines_hidden;
    }
    return c;
}

} // namespace howire

#endif
