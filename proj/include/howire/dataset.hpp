#ifndef HOWIRE_DATASET_HPP
#define HOWIRE_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "howire/camera.hpp"
#include "howire/error.hpp"
#include "howire/image_io.hpp"
#include "howire/mesh.hpp"
#include "howire/raster.hpp"
#include "howire/rng.hpp"
#include "howire/visibility.hpp"
#include "howire/voxel.hpp"
#include "howire/wireframe.hpp"

namespace howire {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// File helpers

inline std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_file_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const fs::path& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("short write to " + path.string());
}

inline void write_file_text(const fs::path& path, const std::string& text) {
    write_file_bytes(path, text.data(), text.size());
}

// ---------------------------------------------------------------------------
// Viewpoints

struct ViewpointParams {
    double max_abs_elevation_sin = 0.95;
    double min_separation_deg = 5.0;
    Vec3 up{0, 0, 1};
    int max_draws = 100000;
};

/// n camera poses looking at `target`, eyes spread over a sphere shell.
///
/// Directions are uniform on the sphere, rejecting near-polar ones and any
/// within min_separation_deg of an already accepted direction.
inline std::vector<CameraPose> sample_viewpoints(std::uint64_t seed, int n, double radius_min, double radius_max,
                                                 Vec3 target = {}, const ViewpointParams& params = {}) {
    if (n < 1) throw ValidationError("sample_viewpoints: n must be at least 1");
    if (!(radius_min > 0 && radius_max >= radius_min)) throw ValidationError("sample_viewpoints: bad radius range");
    Rng rng(seed);
    const double cos_sep = std::cos(params.min_separation_deg * std::numbers::pi / 180.0);
    std::vector<Vec3> dirs;
    std::vector<CameraPose> poses;
    for (int draw = 0; static_cast<int>(poses.size()) < n; ++draw) {
        if (draw >= params.max_draws) throw ValidationError("sample_viewpoints: separation constraint unsatisfiable");
        const double z = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double radius = rng.uniform(radius_min, radius_max);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 dir{s * std::cos(phi), s * std::sin(phi), z};
        if (std::abs(dot(dir, normalized(params.up))) > params.max_abs_elevation_sin) continue;
        if (std::any_of(dirs.begin(), dirs.end(), [&](Vec3 d) { return dot(d, dir) > cos_sep; })) continue;
        dirs.push_back(dir);
        poses.push_back(look_at(target + radius * dir, target, params.up));
    }
    return poses;
}

/// Camera distances at which a bounding sphere of radius r centered on the
/// optical axis spans the given fractions of the image height.
inline std::pair<double, double> framing_distance_range(double bounding_radius, const CameraIntrinsics& k,
                                                        double min_fill = 0.60, double max_fill = 0.85) {
    auto distance_for = [&](double fill) {
        const double half_angle = std::atan(fill * 0.5 * k.height / k.fy);
        return bounding_radius / std::sin(half_angle);
    };
    return {distance_for(max_fill), distance_for(min_fill)};
}

inline double bounding_radius(const TriangleMesh& mesh) {
    double r = 0.0;
    for (Vec3 v : mesh.vertices) r = std::max(r, norm(v));
    return r;
}

// ---------------------------------------------------------------------------
// Samples

struct SampleParams {
    std::size_t min_visible_junctions = 5;
    double min_junction_separation_px = 2.0;
    double face_on_deg = 5.0;   // optical axis this close to a face normal is an accidental view
    double edge_on_deg = 2.0;   // a face seen this close to edge-on from a junction ray is accidental
    ShadingParams shading{};
};

/// One rendered view with its camera-frame labeled wireframe.
struct DataSample {
    std::string sample_id;
    std::string solid_id;
    std::string view_id;
    std::vector<std::uint8_t> image_png;
    WireframeGraph wireframe;
    CameraIntrinsics intrinsics;
    std::vector<std::string> warnings;
};

/// Renders and labels one view of a solid, or throws RejectedView.
inline DataSample make_sample(const Solid& solid, const CameraPose& pose, const CameraIntrinsics& k,
                              const SampleParams& params = {}, DepthBuffer* depth_out = nullptr) {
    k.check();
    DataSample sample;
    sample.intrinsics = k;
    const TriangleMesh mesh = transform_mesh(solid.mesh, pose);
    WireframeGraph g = transform_graph(solid.wireframe, pose);

    for (std::size_t j = 0; j < g.junction_count(); ++j)
        if (!(g.junctions3d[j].z > kProjectionMinDepth)) throw RejectedView("junction behind camera");
    project_junctions(g, k);
    for (std::size_t j = 0; j < g.junction_count(); ++j) {
        const Vec2 p = g.junctions2d[j];
        if (p.x < 0 || p.y < 0 || p.x >= k.width || p.y >= k.height)
            throw RejectedView("junction " + std::to_string(j) + " projects outside the image");
    }

    const double cos_face_on = std::cos(params.face_on_deg * std::numbers::pi / 180.0);
    const double sin_edge_on = std::sin(params.edge_on_deg * std::numbers::pi / 180.0);
    for (std::size_t t = 0; t < mesh.size(); ++t) {
        const Vec3 n = mesh.normal(t);
        if (std::abs(n.z) > cos_face_on) throw RejectedView("accidental viewpoint: face-on view");
        for (Vec3 v : mesh.corners(t))
            if (std::abs(dot(n, v)) < sin_edge_on * norm(v)) throw RejectedView("accidental viewpoint: edge-on face");
    }

    for (std::size_t a = 0; a < g.junction_count(); ++a)
        for (std::size_t b = a + 1; b < g.junction_count(); ++b)
            if (norm(g.junctions2d[a] - g.junctions2d[b]) < params.min_junction_separation_px)
                throw RejectedView("junctions " + std::to_string(a) + " and " + std::to_string(b) +
                                   " project too close together");

    VisibilityResult vis = label_junction_visibility(g, mesh);
    g.junction_visibility = std::move(vis.junction_visibility);
    assign_labels(g);
    sample.warnings = std::move(vis.warnings);

    const LabelCounts counts = count_labels(g);
    if (counts.junctions_observable() < params.min_visible_junctions)
        throw RejectedView("only " + std::to_string(counts.junctions_observable()) + " observable junctions");

    RenderResult render = rasterize(mesh, k, params.shading);
    sample.warnings.insert(sample.warnings.end(), render.warnings.begin(), render.warnings.end());
    sample.image_png = encode_png(render.image);
    if (depth_out) *depth_out = std::move(render.depth);
    sample.wireframe = std::move(g);

    if (const auto v = validate(sample.wireframe); !v.empty())
        throw ValidationError("sample wireframe invalid: " + v.front().message);
    return sample;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json intrinsics_to_json(const CameraIntrinsics& k) {
    return Json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

inline CameraIntrinsics intrinsics_from_json(const Json& j) {
    CameraIntrinsics k;
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
    return k;
}

inline Json wireframe_to_json(const DataSample& s) {
    const WireframeGraph& g = s.wireframe;
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["sample_id"] = s.sample_id;
    j["solid_id"] = s.solid_id;
    j["view_id"] = s.view_id;
    Json junctions = Json::array();
    for (Vec3 p : g.junctions3d) junctions.push_back(Json::array({p.x, p.y, p.z}));
    j["junctions3d"] = std::move(junctions);
    Json lines = Json::array();
    for (const Line& l : g.lines) lines.push_back(Json::array({l.m, l.n}));
    j["lines"] = std::move(lines);
    Json vis = Json::array();
    for (auto v : g.junction_visibility) vis.push_back(static_cast<int>(v));
    j["junction_visibility"] = std::move(vis);
    Json cls = Json::array();
    for (auto c : g.junction_class) cls.push_back(std::string(to_string(c)));
    j["junction_class"] = std::move(cls);
    Json lv = Json::array();
    for (auto v : g.line_visibility) lv.push_back(std::string(to_string(v)));
    j["line_visibility"] = std::move(lv);
    j["intrinsics"] = intrinsics_to_json(s.intrinsics);
    return j;
}

inline void serialize_sample(const DataSample& s, const fs::path& directory) {
    const fs::path dir = directory / s.sample_id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_file_bytes(dir / "image.png", s.image_png.data(), s.image_png.size());
    write_file_text(dir / "wireframe.json", wireframe_to_json(s).dump(1) + "\n");
}

/// Parses a wireframe document; unknown keys are reported in `warnings`.
inline DataSample sample_from_json_text(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("wireframe parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object()) throw FormatError("wireframe document is not a JSON object");
    if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion)
        throw FormatError("unsupported wireframe schema_version (expected " + std::to_string(kSchemaVersion) + ")");

    static const std::set<std::string> known{"schema_version", "sample_id", "solid_id", "view_id", "junctions3d",
                                             "lines", "junction_visibility", "junction_class", "line_visibility",
                                             "intrinsics"};
    if (warnings)
        for (const auto& [key, value] : j.items())
            if (!known.count(key)) warnings->push_back("ignoring unknown field '" + key + "'");

    DataSample s;
    try {
        s.sample_id = j.value("sample_id", "");
        s.solid_id = j.value("solid_id", "");
        s.view_id = j.value("view_id", "");
        WireframeGraph& g = s.wireframe;
        for (const auto& p : j.at("junctions3d")) g.junctions3d.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
        for (const auto& l : j.at("lines")) g.lines.push_back({l.at(0).get<std::size_t>(), l.at(1).get<std::size_t>()});
        for (const auto& v : j.at("junction_visibility")) {
            const int flag = v.get<int>();
            if (flag != 0 && flag != 1) throw FormatError("junction_visibility entries must be 0 or 1");
            g.junction_visibility.push_back(static_cast<std::uint8_t>(flag));
        }
        for (const auto& c : j.at("junction_class")) {
            const auto parsed = parse_junction_class(c.get<std::string>());
            if (!parsed) throw FormatError("unknown junction_class '" + c.get<std::string>() + "'");
            g.junction_class.push_back(*parsed);
        }
        for (const auto& c : j.at("line_visibility")) {
            const auto parsed = parse_line_visibility(c.get<std::string>());
            if (!parsed) throw FormatError("unknown line_visibility '" + c.get<std::string>() + "'");
            g.line_visibility.push_back(*parsed);
        }
        s.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("wireframe schema error: ") + e.what());
    }
    s.intrinsics.check();
    if (const auto v = validate(s.wireframe); !v.empty()) throw ValidationError("wireframe invalid: " + v.front().message);
    for (Vec3 p : s.wireframe.junctions3d)
        if (!(p.z > kProjectionMinDepth)) throw ValidationError("wireframe junction behind camera");
    project_junctions(s.wireframe, s.intrinsics);
    return s;
}

/// Loads `<directory>/<sample_id>/{image.png, wireframe.json}`.
inline DataSample deserialize_sample(const fs::path& sample_dir, std::vector<std::string>* warnings = nullptr) {
    const fs::path wf = sample_dir / "wireframe.json";
    const fs::path img = sample_dir / "image.png";
    if (!fs::exists(wf)) throw IoError("missing " + wf.string());
    if (!fs::exists(img)) throw IoError("missing " + img.string());
    DataSample s = sample_from_json_text(read_file_text(wf), warnings);
    s.image_png = read_file_bytes(img);
    const RgbImage decoded = decode_png(s.image_png);
    if (decoded.width != s.intrinsics.width || decoded.height != s.intrinsics.height)
        throw ValidationError("image size does not match intrinsics");
    return s;
}

// ---------------------------------------------------------------------------
// Manifests

struct ManifestEntry {
    std::string sample_id;
    std::string solid_id;
    std::string view_id;
    std::string image;      // relative to the split directory
    std::string wireframe;  // relative to the split directory

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    std::string split;
    std::uint64_t seed = 0;
    Json config = Json::object();
    std::vector<ManifestEntry> samples;

    void check() const {
        std::set<std::string> ids;
        for (const auto& e : samples)
            if (!ids.insert(e.sample_id).second) throw ValidationError("duplicate sample id " + e.sample_id);
    }
};

inline Json manifest_to_json(const DatasetManifest& m) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["split"] = m.split;
    j["seed"] = m.seed;
    j["config"] = m.config;
    Json samples = Json::array();
    for (const auto& e : m.samples)
        samples.push_back(Json{{"sample_id", e.sample_id},
                               {"solid_id", e.solid_id},
                               {"view_id", e.view_id},
                               {"image", e.image},
                               {"wireframe", e.wireframe}});
    j["samples"] = std::move(samples);
    return j;
}

inline DatasetManifest manifest_from_json(const Json& j) {
    DatasetManifest m;
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) throw FormatError("unsupported manifest schema_version");
        m.split = j.at("split").get<std::string>();
        m.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("config")) m.config = j.at("config");
        for (const auto& e : j.at("samples"))
            m.samples.push_back({e.at("sample_id").get<std::string>(), e.at("solid_id").get<std::string>(),
                                 e.at("view_id").get<std::string>(), e.at("image").get<std::string>(),
                                 e.at("wireframe").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest schema error: ") + e.what());
    }
    m.check();
    return m;
}

inline std::string manifest_text(const DatasetManifest& m) { return manifest_to_json(m).dump(1) + "\n"; }

inline DatasetManifest load_manifest(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("missing manifest " + path.string());
    try {
        return manifest_from_json(Json::parse(read_file_text(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("manifest parse error at byte " + std::to_string(e.byte));
    }
}

/// Reads the labeled wireframe of every manifest entry (images are not decoded).
inline std::vector<DataSample> load_split_samples(const DatasetManifest& m, const fs::path& split_dir) {
    std::vector<DataSample> out;
    out.reserve(m.samples.size());
    for (const auto& e : m.samples) {
        DataSample s = sample_from_json_text(read_file_text(split_dir / e.wireframe));
        if (s.sample_id.empty()) s.sample_id = e.sample_id;
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct CountStats {
    double min = 0, max = 0, mean = 0, std = 0;
};

/// Per-split min / max / mean / population std of the four label counts.
struct StatsSummary {
    std::string split;
    std::size_t samples = 0;
    CountStats junctions_visible;  // observable junctions (visible + fleeting)
    CountStats junctions_hidden;
    CountStats lines_visible;
    CountStats lines_hidden;
};

inline CountStats describe(std::span<const double> values) {
    if (values.empty()) throw ValidationError("statistics of an empty split");
    CountStats s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size()));
    return s;
}

inline StatsSummary compute_stats(const std::string& split, std::span<const LabelCounts> counts) {
    if (counts.empty()) throw ValidationError("split '" + split + "' has no samples");
    std::vector<double> jv, jh, lv, lh;
    for (const auto& c : counts) {
        jv.push_back(static_cast<double>(c.junctions_observable()));
        jh.push_back(static_cast<double>(c.junctions_hidden));
        lv.push_back(static_cast<double>(c.lines_visible));
        lh.push_back(static_cast<double>(c.lines_hidden));
    }
    return {split, counts.size(), describe(jv), describe(jh), describe(lv), describe(lh)};
}

inline StatsSummary compute_stats(const DatasetManifest& m, const fs::path& split_dir) {
    std::vector<LabelCounts> counts;
    for (const auto& s : load_split_samples(m, split_dir)) counts.push_back(count_labels(s.wireframe));
    return compute_stats(m.split, counts);
}

inline Json stats_to_json(const StatsSummary& s) {
    auto row = [](const CountStats& c) { return Json{{"min", c.min}, {"max", c.max}, {"mean", c.mean}, {"std", c.std}}; };
    return Json{{"split", s.split},
                {"samples", s.samples},
                {"J_vis", row(s.junctions_visible)},
                {"J_hidden", row(s.junctions_hidden)},
                {"L_vis", row(s.lines_visible)},
                {"L_hidden", row(s.lines_hidden)}};
}

/// Rows J_vis, J_hidden, L_vis, L_hidden; columns min/max/mean/std per split.
inline std::string format_stats_table(std::span<const StatsSummary> splits) {
    std::string out;
    char buf[256];
    out += "          ";
    for (const auto& s : splits) {
        std::snprintf(buf, sizeof buf, "| %-36s", (s.split + " (" + std::to_string(s.samples) + " samples)").c_str());
        out += buf;
    }
    out += "\n          ";
    for (std::size_t i = 0; i < splits.size(); ++i) out += "|   min     max    mean     std       ";
    out += "\n";
    const char* names[] = {"J_vis", "J_hidden", "L_vis", "L_hidden"};
    for (int r = 0; r < 4; ++r) {
        std::snprintf(buf, sizeof buf, "%-10s", names[r]);
        out += buf;
        for (const auto& s : splits) {
            const CountStats& c = r == 0 ? s.junctions_visible
                                  : r == 1 ? s.junctions_hidden
                                  : r == 2 ? s.lines_visible
                                           : s.lines_hidden;
            std::snprintf(buf, sizeof buf, "| %5.0f %7.0f %7.2f %7.2f       ", c.min, c.max, c.mean, c.std);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whole-dataset generation

struct DatasetConfig {
    std::uint64_t seed = 42;
    int solids = 100;
    int views = 24;
    double split_ratio = 0.9;
    SolidGenParams solid{};
    CameraIntrinsics intrinsics = CameraIntrinsics::default_256();
    SampleParams sample{};
    int min_views_per_solid = 4;  // solids with 3 or fewer usable views are dropped
    bool write_depth = false;

    Json to_json() const {
        return Json{{"seed", seed},
                    {"solids", solids},
                    {"views", views},
                    {"split_ratio", split_ratio},
                    {"grid_limits", Json::array({solid.grid_limits[0], solid.grid_limits[1], solid.grid_limits[2]})},
                    {"min_voxels", solid.min_voxels},
                    {"max_voxels", solid.max_voxels},
                    {"voxel_size", solid.voxel_size},
                    {"intrinsics", intrinsics_to_json(intrinsics)},
                    {"min_visible_junctions", sample.min_visible_junctions},
                    {"min_junction_separation_px", sample.min_junction_separation_px},
                    {"min_views_per_solid", min_views_per_solid}};
    }
};

struct GeneratedSolid {
    std::string solid_id;
    std::vector<DataSample> samples;
    std::vector<DepthBuffer> depths;
};

/// Builds the accepted samples of one candidate solid, in view order.
inline GeneratedSolid generate_solid_samples(const Solid& solid, std::uint64_t view_seed, const DatasetConfig& cfg,
                                             std::size_t* rejected_views = nullptr) {
    GeneratedSolid out;
    const auto [dmin, dmax] = framing_distance_range(bounding_radius(solid.mesh), cfg.intrinsics);
    const auto poses = sample_viewpoints(view_seed, cfg.views, dmin, dmax);
    for (std::size_t v = 0; v < poses.size(); ++v) {
        try {
            DepthBuffer depth;
            DataSample s = make_sample(solid, poses[v], cfg.intrinsics, cfg.sample, cfg.write_depth ? &depth : nullptr);
            char view[16];
            std::snprintf(view, sizeof view, "v%02zu", v);
            s.view_id = view;
            out.samples.push_back(std::move(s));
            if (cfg.write_depth) out.depths.push_back(std::move(depth));
        } catch (const RejectedView&) {
            if (rejected_views) ++*rejected_views;
        }
    }
    return out;
}

struct GenerateSummary {
    std::size_t solids = 0;
    std::size_t samples = 0;
    std::size_t train_samples = 0;
    std::size_t test_samples = 0;
    std::size_t rejected_views = 0;
    std::size_t skipped_solids = 0;  // duplicates or too few usable views
    std::vector<DatasetManifest> manifests;
};

/// Generates samples in memory; solid order and ids are fully determined by cfg.seed.
inline std::vector<GeneratedSolid> generate_samples(const DatasetConfig& cfg, GenerateSummary& summary) {
    if (cfg.solids < 1 || cfg.views < 1) throw ValidationError("solids and views must be positive");
    std::vector<GeneratedSolid> solids;
    std::set<std::string> seen_keys;
    const long max_attempts = 50L * cfg.solids + 100;
    for (long attempt = 0; static_cast<int>(solids.size()) < cfg.solids && attempt < max_attempts; ++attempt) {
        const std::uint64_t solid_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(attempt));
        Solid solid = generate_solid(solid_seed, cfg.solid);
        if (!seen_keys.insert(solid.key).second) {
            ++summary.skipped_solids;
            continue;
        }
        GeneratedSolid gs = generate_solid_samples(solid, mix_seed(solid_seed, 1), cfg, &summary.rejected_views);
        if (static_cast<int>(gs.samples.size()) < cfg.min_views_per_solid) {
            ++summary.skipped_solids;
            continue;
        }
        char id[32];
        std::snprintf(id, sizeof id, "solid_%04zu", solids.size());
        gs.solid_id = id;
        for (auto& s : gs.samples) {
            s.solid_id = gs.solid_id;
            char sid[48];
            std::snprintf(sid, sizeof sid, "s%04zu_%s", solids.size(), s.view_id.c_str());
            s.sample_id = sid;
            s.view_id = sid;
        }
        solids.push_back(std::move(gs));
    }
    return solids;
}

/// Indices of solids assigned to the training split (the rest form the test split).
inline std::vector<char> assign_splits(std::size_t solid_count, double split_ratio, std::uint64_t seed) {
    std::vector<std::size_t> order(solid_count);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, 0x5EED5E1Dull));
    for (std::size_t i = solid_count; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
    const auto n_train = static_cast<std::size_t>(std::llround(split_ratio * static_cast<double>(solid_count)));
    std::vector<char> train(solid_count, 0);
    for (std::size_t i = 0; i < std::min(n_train, solid_count); ++i) train[order[i]] = 1;
    return train;
}

/// Creates `<root>/train` and `<root>/test` with samples and manifests.
///
/// Manifests are written last, so a failure midway never leaves a manifest
/// pointing at missing files.
inline GenerateSummary generate_dataset(const DatasetConfig& cfg, const fs::path& root) {
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("cannot create data root " + root.string() + ": " + ec.message());
    {
        const fs::path probe = root / ".howire_write_probe";
        std::ofstream test(probe);
        if (!test) throw IoError("data root " + root.string() + " is not writable");
        test.close();
        fs::remove(probe, ec);
    }

    GenerateSummary summary;
    auto solids = generate_samples(cfg, summary);
    const auto train = assign_splits(solids.size(), cfg.split_ratio, cfg.seed);

    DatasetManifest manifests[2];
    manifests[0].split = "train";
    manifests[1].split = "test";
    for (auto& m : manifests) {
        m.seed = cfg.seed;
        m.config = cfg.to_json();
    }
    for (std::size_t i = 0; i < solids.size(); ++i) {
        DatasetManifest& m = manifests[train[i] ? 0 : 1];
        const fs::path split_dir = root / m.split;
        for (std::size_t v = 0; v < solids[i].samples.size(); ++v) {
            const DataSample& s = solids[i].samples[v];
            serialize_sample(s, split_dir);
            if (cfg.write_depth) {
                const auto raw = encode_depth_raw(solids[i].depths[v]);
                write_file_bytes(split_dir / s.sample_id / "depth.bin", raw.data(), raw.size());
            }
            m.samples.push_back({s.sample_id, s.solid_id, s.view_id, s.sample_id + "/image.png",
                                 s.sample_id + "/wireframe.json"});
        }
    }
    for (auto& m : manifests) {
        fs::create_directories(root / m.split, ec);
        if (ec) throw IoError("cannot create split directory: " + ec.message());
        write_file_text(root / m.split / "manifest.json", manifest_text(m));
    }
    summary.solids = solids.size();
    summary.train_samples = manifests[0].samples.size();
    summary.test_samples = manifests[1].samples.size();
    summary.samples = summary.train_samples + summary.test_samples;
    summary.manifests = {manifests[0], manifests[1]};
    return summary;
}

} // namespace howire

#endif
