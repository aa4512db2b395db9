#ifndef HOWIRE_METRICS_HPP
#define HOWIRE_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "howire/camera.hpp"
#include "howire/dataset.hpp"
#include "howire/error.hpp"
#include "howire/mesh.hpp"
#include "howire/rng.hpp"
#include "howire/wireframe.hpp"

namespace howire {

// Evaluation thresholds. 3D values are in diagonal-normalized model units,
// 2D junction values in pixels, 2D line values in squared pixels (sum over
// both endpoints) at native image resolution.
inline const std::vector<double> kLine3dThresholds{0.01, 0.03, 0.05, 0.07};
inline const std::vector<double> kJunction3dThresholds{0.02, 0.03, 0.05};
inline const std::vector<double> kJunction2dThresholds{1.0, 2.0};
inline const std::vector<double> kLine2dThresholds{10.0, 15.0};

enum class EvalSpace { image2d, model3d };

// ---------------------------------------------------------------------------
// Model normalization

/// Translation to the junction centroid plus uniform scale to unit bounding-box diagonal.
struct ModelNormalization {
    Vec3 centroid;
    double scale = 1.0;

    Vec3 apply(Vec3 p) const { return scale * (p - centroid); }
};

inline ModelNormalization model_normalization(std::span<const Vec3> junctions) {
    if (junctions.size() < 2) throw ValidationError("normalization needs at least two junctions");
    Bounds b;
    Vec3 sum;
    for (Vec3 p : junctions) {
        b.expand(p);
        sum += p;
    }
    const double diag = b.diagonal();
    if (!(diag > 1e-12)) throw ValidationError("normalization of coincident junctions");
    return {sum / static_cast<double>(junctions.size()), 1.0 / diag};
}

inline std::vector<Vec3> normalize_model_scale(std::span<const Vec3> junctions) {
    const ModelNormalization n = model_normalization(junctions);
    std::vector<Vec3> out;
    out.reserve(junctions.size());
    for (Vec3 p : junctions) out.push_back(n.apply(p));
    return out;
}

// ---------------------------------------------------------------------------
// Detections and ground truth in a common evaluation space

struct JunctionItem {
    Vec3 position;  // z = 0 for 2D
    double score = 1.0;
    JunctionClass cls = JunctionClass::visible;
};

struct LineItem {
    Vec3 p1, p2;
    double score = 1.0;
    LineVisibility cls = LineVisibility::visible;
};

/// One detection outcome, kept with its confidence for pooled PR curves.
struct ScoredHit {
    double score;
    bool true_positive;
};

/// Hits and ground-truth count for one (class, threshold) cell, possibly pooled over samples.
struct HitStream {
    std::vector<ScoredHit> hits;
    std::size_t ground_truth = 0;

    void merge(const HitStream& other) {
        hits.insert(hits.end(), other.hits.begin(), other.hits.end());
        ground_truth += other.ground_truth;
    }
    std::size_t true_positives() const {
        return static_cast<std::size_t>(
            std::count_if(hits.begin(), hits.end(), [](const ScoredHit& h) { return h.true_positive; }));
    }
};

/// Area under the precision envelope of the PR curve, in percent.
///
/// Hits are stable-sorted by descending score. Precision is replaced by its
/// running maximum from the right, and AP sums envelope precision over each
/// recall increment (all-points interpolation).
inline double average_precision(HitStream stream) {
    if (stream.ground_truth == 0 || stream.hits.empty()) return 0.0;
    std::stable_sort(stream.hits.begin(), stream.hits.end(),
                     [](const ScoredHit& a, const ScoredHit& b) { return a.score > b.score; });
    const std::size_t n = stream.hits.size();
    std::vector<double> precision(n), recall(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        tp += stream.hits[i].true_positive ? 1 : 0;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(stream.ground_truth);
    }
    for (std::size_t i = n - 1; i > 0; --i) precision[i - 1] = std::max(precision[i - 1], precision[i]);
    double ap = 0.0, prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    return 100.0 * ap;
}

/// Greedy one-to-one matching in descending score order (ties keep input order).
/// `distance(pred, gt)` is compared against the threshold with <=.
template <class Pred, class Gt, class Distance>
HitStream greedy_match(std::span<const Pred> preds, std::span<const Gt> gts, double threshold, Distance distance) {
    std::vector<std::size_t> order(preds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });

    HitStream out;
    out.ground_truth = gts.size();
    std::vector<char> taken(gts.size(), 0);
    for (std::size_t i : order) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_gt = gts.size();
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (taken[g]) continue;
            const double d = distance(preds[i], gts[g]);
            if (d < best) {
                best = d;
                best_gt = g;
            }
        }
        const bool tp = best_gt < gts.size() && best <= threshold;
        if (tp) taken[best_gt] = 1;
        out.hits.push_back({preds[i].score, tp});
    }
    return out;
}

inline double junction_distance(const JunctionItem& a, const JunctionItem& b) { return norm(a.position - b.position); }

/// 2D: minimum over endpoint orderings of the summed squared endpoint distances.
inline double line_distance_2d(const LineItem& p, const LineItem& g) {
    auto sq = [](Vec3 a, Vec3 b) { const Vec3 d = a - b; return d.x * d.x + d.y * d.y; };
    return std::min(sq(p.p1, g.p1) + sq(p.p2, g.p2), sq(p.p1, g.p2) + sq(p.p2, g.p1));
}

/// 3D: minimum over endpoint orderings of the larger endpoint distance.
inline double line_distance_3d(const LineItem& p, const LineItem& g) {
    return std::min(std::max(norm(p.p1 - g.p1), norm(p.p2 - g.p2)), std::max(norm(p.p1 - g.p2), norm(p.p2 - g.p1)));
}

template <class Item, class Cls>
std::vector<Item> filter_class(std::span<const Item> items, std::optional<Cls> cls) {
    std::vector<Item> out;
    for (const auto& it : items)
        if (!cls || it.cls == *cls) out.push_back(it);
    return out;
}

inline HitStream junction_hits(std::span<const JunctionItem> preds, std::span<const JunctionItem> gts, double threshold,
                               std::optional<JunctionClass> cls) {
    const auto p = filter_class(preds, cls);
    const auto g = filter_class(gts, cls);
    return greedy_match(std::span<const JunctionItem>(p), std::span<const JunctionItem>(g), threshold, junction_distance);
}

inline HitStream line_hits(std::span<const LineItem> preds, std::span<const LineItem> gts, double threshold,
                           EvalSpace space, std::optional<LineVisibility> cls) {
    const auto p = filter_class(preds, cls);
    const auto g = filter_class(gts, cls);
    if (space == EvalSpace::image2d)
        return greedy_match(std::span<const LineItem>(p), std::span<const LineItem>(g), threshold, line_distance_2d);
    return greedy_match(std::span<const LineItem>(p), std::span<const LineItem>(g), threshold, line_distance_3d);
}

/// Junction AP (percent) for one sample; nullopt class means all classes together.
inline double junction_ap(std::span<const JunctionItem> preds, std::span<const JunctionItem> gts, double threshold,
                          std::optional<JunctionClass> cls = std::nullopt) {
    return average_precision(junction_hits(preds, gts, threshold, cls));
}

/// Structural line AP (percent) for one sample.
inline double line_sap(std::span<const LineItem> preds, std::span<const LineItem> gts, double threshold,
                       EvalSpace space, std::optional<LineVisibility> cls = std::nullopt) {
    return average_precision(line_hits(preds, gts, threshold, space, cls));
}

// ---------------------------------------------------------------------------
// Prediction files

struct PredictedJunction {
    Vec2 xy;
    std::optional<double> z;  // camera-frame depth; absent for 2D-only predictions
    double score = 1.0;
    JunctionClass cls = JunctionClass::visible;
};

struct PredictedLine {
    Vec2 a, b;
    std::optional<double> za, zb;
    double score = 1.0;
    LineVisibility cls = LineVisibility::visible;
};

struct SamplePredictions {
    std::string sample_id;
    std::vector<PredictedJunction> junctions;
    std::vector<PredictedLine> lines;
};

inline Json predictions_to_json(std::span<const SamplePredictions> preds) {
    Json out = Json::array();
    for (const auto& s : preds) {
        Json junctions = Json::array(), lines = Json::array();
        for (const auto& j : s.junctions) {
            Json item{{"x", j.xy.x}, {"y", j.xy.y}};
            if (j.z) item["z"] = *j.z;
            item["score"] = j.score;
            item["class"] = std::string(to_string(j.cls));
            junctions.push_back(std::move(item));
        }
        for (const auto& l : s.lines) {
            Json p1 = Json::array({l.a.x, l.a.y}), p2 = Json::array({l.b.x, l.b.y});
            if (l.za && l.zb) {
                p1.push_back(*l.za);
                p2.push_back(*l.zb);
            }
            lines.push_back(Json{{"p1", p1}, {"p2", p2}, {"score", l.score}, {"class", std::string(to_string(l.cls))}});
        }
        out.push_back(Json{{"sample_id", s.sample_id}, {"junctions", std::move(junctions)}, {"lines", std::move(lines)}});
    }
    return out;
}

inline std::vector<SamplePredictions> predictions_from_json(const Json& doc) {
    if (!doc.is_array()) throw FormatError("prediction file must hold a JSON array");
    std::vector<SamplePredictions> out;
    try {
        for (const auto& s : doc) {
            SamplePredictions sp;
            sp.sample_id = s.at("sample_id").get<std::string>();
            for (const auto& j : s.value("junctions", Json::array())) {
                PredictedJunction pj;
                pj.xy = {j.at("x").get<double>(), j.at("y").get<double>()};
                if (j.contains("z") && !j["z"].is_null()) pj.z = j["z"].get<double>();
                pj.score = j.at("score").get<double>();
                const auto cls = parse_junction_class(j.at("class").get<std::string>());
                if (!cls) throw FormatError("unknown junction class in predictions");
                pj.cls = *cls;
                sp.junctions.push_back(pj);
            }
            for (const auto& l : s.value("lines", Json::array())) {
                PredictedLine pl;
                const auto& p1 = l.at("p1");
                const auto& p2 = l.at("p2");
                pl.a = {p1.at(0).get<double>(), p1.at(1).get<double>()};
                pl.b = {p2.at(0).get<double>(), p2.at(1).get<double>()};
                if (p1.size() >= 3 && p2.size() >= 3) {
                    pl.za = p1.at(2).get<double>();
                    pl.zb = p2.at(2).get<double>();
                }
                pl.score = l.at("score").get<double>();
                const auto cls = parse_line_visibility(l.at("class").get<std::string>());
                if (!cls) throw FormatError("unknown line class in predictions");
                pl.cls = *cls;
                sp.lines.push_back(pl);
            }
            out.push_back(std::move(sp));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("prediction file schema error: ") + e.what());
    }
    for (const auto& s : out)
        for (const auto& j : s.junctions)
            if (!(j.score >= 0.0 && j.score <= 1.0)) throw ValidationError("prediction score outside [0, 1]");
    return out;
}

/// Ground truth re-emitted as predictions (score 1), optionally with Gaussian
/// image-plane noise of `sigma_px` on every junction and line endpoint.
inline std::vector<SamplePredictions> ground_truth_as_predictions(std::span<const DataSample> samples,
                                                                  double sigma_px = 0.0, std::uint64_t seed = 0) {
    Rng rng(seed);
    auto jitter = [&](Vec2 p) { return sigma_px > 0 ? Vec2{p.x + sigma_px * rng.normal(), p.y + sigma_px * rng.normal()} : p; };
    std::vector<SamplePredictions> out;
    for (const auto& s : samples) {
        const WireframeGraph& g = s.wireframe;
        SamplePredictions sp;
        sp.sample_id = s.sample_id;
        std::vector<Vec2> noisy;
        for (std::size_t j = 0; j < g.junction_count(); ++j) {
            const Vec2 p = jitter(project(g.junctions3d[j], s.intrinsics));
            noisy.push_back(p);
            sp.junctions.push_back({p, g.junctions3d[j].z, 1.0, g.junction_class[j]});
        }
        for (std::size_t i = 0; i < g.lines.size(); ++i) {
            const Line& l = g.lines[i];
            sp.lines.push_back({noisy[l.m], noisy[l.n], g.junctions3d[l.m].z, g.junctions3d[l.n].z, 1.0, g.line_visibility[i]});
        }
        out.push_back(std::move(sp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset evaluation and reports

struct ReportTable {
    std::string name;
    std::string metric;  // "AP" or "sAP"
    EvalSpace space;
    std::vector<std::string> classes;
    std::vector<double> thresholds;
    std::vector<std::vector<double>> values;  // [class][threshold]
};

struct EvalReport {
    std::string method = "predictions";
    std::vector<ReportTable> tables;  // 3D lines, 3D junctions, 2D junctions, 2D lines
    std::vector<std::string> warnings;

    const ReportTable& table(const std::string& name) const {
        for (const auto& t : tables)
            if (t.name == name) return t;
        throw ValidationError("no report table " + name);
    }
    double value(const std::string& table_name, const std::string& cls, double threshold) const {
        const ReportTable& t = table(table_name);
        const auto ci = std::find(t.classes.begin(), t.classes.end(), cls) - t.classes.begin();
        const auto ti = std::find(t.thresholds.begin(), t.thresholds.end(), threshold) - t.thresholds.begin();
        if (ci == static_cast<long>(t.classes.size()) || ti == static_cast<long>(t.thresholds.size()))
            throw ValidationError("no report cell " + table_name + "/" + cls);
        return t.values[ci][ti];
    }
};

namespace detail {

struct EvalItems {
    std::vector<JunctionItem> pred_j2, gt_j2, pred_j3, gt_j3;
    std::vector<LineItem> pred_l2, gt_l2, pred_l3, gt_l3;
};

inline EvalItems eval_items(const DataSample& gt, const SamplePredictions* pred) {
    EvalItems out;
    const WireframeGraph& g = gt.wireframe;
    const CameraIntrinsics& k = gt.intrinsics;
    const ModelNormalization norm3 = model_normalization(g.junctions3d);
    std::vector<Vec2> gt2;
    for (std::size_t j = 0; j < g.junction_count(); ++j) {
        const Vec2 p = project(g.junctions3d[j], k);
        gt2.push_back(p);
        out.gt_j2.push_back({{p.x, p.y, 0}, 1.0, g.junction_class[j]});
        out.gt_j3.push_back({norm3.apply(g.junctions3d[j]), 1.0, g.junction_class[j]});
    }
    for (std::size_t i = 0; i < g.lines.size(); ++i) {
        const Line& l = g.lines[i];
        out.gt_l2.push_back({{gt2[l.m].x, gt2[l.m].y, 0}, {gt2[l.n].x, gt2[l.n].y, 0}, 1.0, g.line_visibility[i]});
        out.gt_l3.push_back({norm3.apply(g.junctions3d[l.m]), norm3.apply(g.junctions3d[l.n]), 1.0, g.line_visibility[i]});
    }
    if (!pred) return out;
    for (const auto& j : pred->junctions) {
        out.pred_j2.push_back({{j.xy.x, j.xy.y, 0}, j.score, j.cls});
        if (j.z && *j.z > 0) out.pred_j3.push_back({norm3.apply(lift(j.xy, *j.z, k)), j.score, j.cls});
    }
    for (const auto& l : pred->lines) {
        out.pred_l2.push_back({{l.a.x, l.a.y, 0}, {l.b.x, l.b.y, 0}, l.score, l.cls});
        if (l.za && l.zb && *l.za > 0 && *l.zb > 0)
            out.pred_l3.push_back({norm3.apply(lift(l.a, *l.za, k)), norm3.apply(lift(l.b, *l.zb, k)), l.score, l.cls});
    }
    return out;
}

} // namespace detail

/// Pools per-sample greedy matches into one PR curve per (class, threshold).
///
/// Samples without an entry in `predictions` contribute their ground truth
/// and no detections. Throws if a prediction refers to an unknown sample.
inline EvalReport evaluate_dataset(std::span<const SamplePredictions> predictions, std::span<const DataSample> ground_truth) {
    std::map<std::string, const SamplePredictions*> by_id;
    for (const auto& p : predictions) by_id[p.sample_id] = &p;
    std::set<std::string> known;
    for (const auto& s : ground_truth) known.insert(s.sample_id);
    std::vector<std::string> missing;
    for (const auto& [id, p] : by_id)
        if (!known.count(id)) missing.push_back(id);
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing) list += " " + id;
        throw ValidationError("predictions reference unknown sample ids:" + list);
    }

    const std::vector<std::optional<JunctionClass>> jclasses{JunctionClass::visible, JunctionClass::fleeting,
                                                             JunctionClass::hidden, std::nullopt};
    const std::vector<std::optional<LineVisibility>> lclasses{LineVisibility::visible, LineVisibility::hidden, std::nullopt};

    EvalReport report;
    report.tables = {
        {"lines_3d", "sAP", EvalSpace::model3d, {"visible", "hidden", "all"}, kLine3dThresholds, {}},
        {"junctions_3d", "AP", EvalSpace::model3d, {"visible", "fleeting", "hidden", "all"}, kJunction3dThresholds, {}},
        {"junctions_2d", "AP", EvalSpace::image2d, {"visible", "fleeting", "hidden", "all"}, kJunction2dThresholds, {}},
        {"lines_2d", "sAP", EvalSpace::image2d, {"visible", "hidden", "all"}, kLine2dThresholds, {}},
    };
    std::vector<std::vector<std::vector<HitStream>>> pools(report.tables.size());
    for (std::size_t t = 0; t < report.tables.size(); ++t)
        pools[t].assign(report.tables[t].classes.size(), std::vector<HitStream>(report.tables[t].thresholds.size()));

    for (const auto& gt : ground_truth) {
        const auto it = by_id.find(gt.sample_id);
        const detail::EvalItems items = detail::eval_items(gt, it == by_id.end() ? nullptr : it->second);
        for (std::size_t t = 0; t < report.tables.size(); ++t) {
            const ReportTable& table = report.tables[t];
            for (std::size_t c = 0; c < table.classes.size(); ++c)
                for (std::size_t h = 0; h < table.thresholds.size(); ++h) {
                    const double thr = table.thresholds[h];
                    HitStream s;
                    if (table.name == "lines_3d") s = line_hits(items.pred_l3, items.gt_l3, thr, EvalSpace::model3d, lclasses[c]);
                    else if (table.name == "junctions_3d") s = junction_hits(items.pred_j3, items.gt_j3, thr, jclasses[c]);
                    else if (table.name == "junctions_2d") s = junction_hits(items.pred_j2, items.gt_j2, thr, jclasses[c]);
                    else s = line_hits(items.pred_l2, items.gt_l2, thr, EvalSpace::image2d, lclasses[c]);
                    pools[t][c][h].merge(s);
                }
        }
    }
    for (std::size_t t = 0; t < report.tables.size(); ++t) {
        ReportTable& table = report.tables[t];
        table.values.assign(table.classes.size(), std::vector<double>(table.thresholds.size(), 0.0));
        for (std::size_t c = 0; c < table.classes.size(); ++c)
            for (std::size_t h = 0; h < table.thresholds.size(); ++h) {
                const HitStream& s = pools[t][c][h];
                if (s.ground_truth == 0 && !s.hits.empty() && h == 0)
                    report.warnings.push_back(table.name + "/" + table.classes[c] + ": predictions but no ground truth");
                table.values[c][h] = average_precision(s);
            }
    }
    return report;
}

inline Json report_to_json(const EvalReport& r) {
    Json tables = Json::array();
    for (const auto& t : r.tables) {
        Json values = Json::object();
        for (std::size_t c = 0; c < t.classes.size(); ++c) values[t.classes[c]] = t.values[c];
        tables.push_back(Json{{"name", t.name},
                              {"metric", t.metric},
                              {"space", t.space == EvalSpace::image2d ? "2d" : "3d"},
                              {"classes", t.classes},
                              {"thresholds", t.thresholds},
                              {"values", std::move(values)}});
    }
    return Json{{"method", r.method}, {"tables", std::move(tables)}, {"warnings", r.warnings}};
}

/// Aligned text rendering: one block per table, class groups as column headers.
inline std::string format_report(const EvalReport& r) {
    static const std::map<std::string, std::string> titles{
        {"lines_3d", "sAP of line segments in 3D (normalized model units)"},
        {"junctions_3d", "AP of junctions in 3D (normalized model units)"},
        {"junctions_2d", "AP of junctions in 2D (pixels)"},
        {"lines_2d", "sAP of line segments in 2D (squared pixels)"}};
    static const std::map<std::string, std::string> short_class{
        {"visible", "v"}, {"fleeting", "f"}, {"hidden", "h"}, {"all", "all"}};
    std::string out;
    char buf[128];
    const std::size_t label_width = std::max<std::size_t>(12, r.method.size() + 1);
    for (const auto& t : r.tables) {
        const bool lines = t.name.rfind("lines", 0) == 0;
        out += titles.at(t.name) + "\n";
        const std::size_t group = t.thresholds.size() * 7;
        out += std::string(label_width, ' ');
        for (const auto& c : t.classes) {
            std::snprintf(buf, sizeof buf, "| %-*s", static_cast<int>(group), (t.metric + " " + (lines ? "L_" : "J_") + short_class.at(c)).c_str());
            out += buf;
        }
        out += "\n" + std::string(label_width, ' ');
        for (std::size_t c = 0; c < t.classes.size(); ++c) {
            out += "| ";
            for (double thr : t.thresholds) {
                std::snprintf(buf, sizeof buf, "%6g ", thr);
                out += buf;
            }
        }
        out += "\n";
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_width), r.method.c_str());
        out += buf;
        for (std::size_t c = 0; c < t.classes.size(); ++c) {
            out += "| ";
            for (double v : t.values[c]) {
                std::snprintf(buf, sizeof buf, "%6.1f ", v);
                out += buf;
            }
        }
        out += "\n\n";
    }
    for (const auto& w : r.warnings) out += "warning: " + w + "\n";
    return out;
}

} // namespace howire

#endif
