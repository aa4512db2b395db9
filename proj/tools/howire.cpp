#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "howire/config.hpp"
#include "howire/curation.hpp"
#include "howire/curation_service.hpp"
#include "howire/dataset.hpp"
#include "howire/hidden_junctions.hpp"
#include "howire/metrics.hpp"
#include "howire/oracle.hpp"

namespace {

using namespace howire;

// Exit codes shared by all subcommands.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;   // an oracle check failed
constexpr int kExitInput = 2;     // missing or unwritable files, bad input
constexpr int kExitIdMismatch = 3;

struct CommonFlags {
    std::optional<std::string> config_file;
    ConfigOverrides overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_file, "JSON config file");
    cmd->add_option("--data-root", f.overrides.data_root, "dataset root (overrides HOWIRE_DATA_ROOT)");
    cmd->add_option("--seed", f.overrides.seed, "generator seed");
}

ToolConfig resolve(const CommonFlags& f) {
    std::optional<fs::path> file;
    if (f.config_file) file = fs::path(*f.config_file);
    return resolve_config(file, f.overrides);
}

int cmd_generate(const CommonFlags& f) {
    const ToolConfig cfg = resolve(f);
    const GenerateSummary s = generate_dataset(cfg.dataset_config(), cfg.data_root);
    std::printf("generated %zu solids, %zu samples (train %zu, test %zu); rejected views %zu, skipped solids %zu -> %s\n",
                s.solids, s.samples, s.train_samples, s.test_samples, s.rejected_views, s.skipped_solids,
                cfg.data_root.c_str());
    return kExitOk;
}

int cmd_stats(const CommonFlags& f, const std::optional<std::string>& json_out) {
    const ToolConfig cfg = resolve(f);
    const fs::path root = cfg.data_root;
    std::vector<StatsSummary> splits;
    for (const auto& split : kSplitNames) {
        const fs::path manifest = root / split / "manifest.json";
        if (!fs::exists(manifest)) throw IoError("missing manifest " + manifest.string());
        splits.push_back(compute_stats(load_manifest(manifest), root / split));
    }
    std::fputs(format_stats_table(splits).c_str(), stdout);
    Json j = Json::object();
    for (const auto& s : splits) j[s.split] = stats_to_json(s);
    const fs::path out = json_out ? fs::path(*json_out) : root / "stats.json";
    write_file_text(out, j.dump(1) + "\n");
    std::printf("stats written to %s\n", out.string().c_str());
    return kExitOk;
}

std::vector<DataSample> load_split(const fs::path& root, const std::string& split) {
    const fs::path manifest = root / split / "manifest.json";
    if (!fs::exists(manifest)) throw IoError("missing manifest " + manifest.string());
    return load_split_samples(load_manifest(manifest), root / split);
}

int cmd_eval(const CommonFlags& f, const std::string& predictions, const std::string& split,
             const std::optional<std::string>& out, const std::string& method) {
    const ToolConfig cfg = resolve(f);
    const auto gt = load_split(cfg.data_root, split);
    Json doc;
    try {
        doc = Json::parse(read_file_text(predictions));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("prediction file " + predictions + ": " + e.what());
    }
    const auto preds = predictions_from_json(doc);
    EvalReport report;
    try {
        report = evaluate_dataset(preds, gt);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIdMismatch;
    }
    report.method = method;
    std::fputs(format_report(report).c_str(), stdout);
    const fs::path out_path = out ? fs::path(*out) : fs::path(predictions + ".report.json");
    write_file_text(out_path, report_to_json(report).dump(1) + "\n");
    std::printf("report written to %s\n", out_path.string().c_str());
    return kExitOk;
}

int cmd_gt_predictions(const CommonFlags& f, const std::string& split, double noise, const std::string& out) {
    const ToolConfig cfg = resolve(f);
    const auto gt = load_split(cfg.data_root, split);
    const auto preds = ground_truth_as_predictions(gt, noise, cfg.seed);
    write_file_text(out, predictions_to_json(preds).dump(1) + "\n");
    std::printf("wrote predictions for %zu samples to %s\n", preds.size(), out.c_str());
    return kExitOk;
}

void print_sweep(const char* name, const SweepReport& r) {
    std::printf("%-10s instances %zu, comparisons %zu, mismatches %zu, %.2f s -> %s\n", name, r.instances,
                r.comparisons, r.mismatches, r.seconds, r.passed() ? "ok" : "MISMATCH");
    if (!r.passed()) std::printf("first failing instance:\n%s\n", r.first_failure.c_str());
}

int cmd_oracle_check(const CommonFlags& f, std::size_t instances, std::size_t solids, int views,
                     const std::string& fault_name) {
    const ToolConfig cfg = resolve(f);
    const auto fault = parse_oracle_fault(fault_name);
    if (!fault) throw ValidationError("unknown fault '" + fault_name + "' (none, bvh, hungarian)");
    const SweepReport m = matching_sweep(cfg.seed, {instances, 7, 10.0}, *fault);
    print_sweep("matching", m);
    VisibilitySweepParams vp;
    vp.solids = solids;
    vp.views = views;
    vp.intrinsics = cfg.intrinsics;
    const SweepReport v = visibility_sweep(cfg.seed, vp, *fault);
    print_sweep("visibility", v);
    return m.passed() && v.passed() ? kExitOk : kExitFailure;
}

int cmd_loss_check(const std::optional<std::string>& input) {
    std::vector<HiddenJunctionPrediction> slots;
    std::vector<HiddenJunctionTarget> targets;
    LossWeights weights;
    if (input) {
        Json j;
        try {
            j = Json::parse(read_file_text(*input));
            for (const auto& p : j.at("predictions"))
                slots.push_back({p.at("x").get<double>(), p.at("y").get<double>(), p.at("z").get<double>(),
                                 p.at("c").get<double>()});
            for (const auto& t : j.at("targets"))
                targets.push_back({t.at("x").get<double>(), t.at("y").get<double>(), t.at("z").get<double>()});
            weights.xy = j.value("lambda_xy", weights.xy);
            weights.z = j.value("lambda_z", weights.z);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("loss input: ") + e.what());
        }
    } else {
        slots = {{12, 19, 0.7, 0.8}, {0, 0, 0, 1e-7}};
        targets = {{10, 20, 0.5}};
    }
    const LossBreakdown b = hidden_junction_loss(slots, targets, weights);
    std::printf("slots %zu, targets %zu, lambda_xy %g, lambda_z %g\n", slots.size(), targets.size(), weights.xy,
                weights.z);
    std::printf("classification %.6f\nxy             %.6f\nz              %.6f\ntotal          %.6f\n", b.classification,
                b.xy, b.z, b.total);
    for (std::size_t i = 0; i < b.matching.column_of_row.size(); ++i)
        std::printf("target %zu -> slot %ld\n", i, b.matching.column_of_row[i]);
    return kExitOk;
}

std::atomic<httplib::Server*> g_server{nullptr};

void stop_server(int) {
    if (auto* s = g_server.load()) s->stop();
}

int cmd_curate_serve(const CommonFlags& f, bool allow_partial) {
    const ToolConfig cfg = resolve(f);
    CurationService service(cfg.data_root, cfg.roster, {allow_partial});
    httplib::Server server;
    service.mount(server);
    const auto [host, port] = cfg.parse_bind();
    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    std::printf("curation service for %s on http://%s:%d\n", cfg.data_root.c_str(), host.c_str(), port);
    std::fflush(stdout);
    const bool ok = server.listen(host, port);
    g_server = nullptr;
    if (!ok && !server.is_running()) {
        std::fprintf(stderr, "error: cannot listen on %s\n", cfg.bind.c_str());
        return kExitInput;
    }
    return kExitOk;
}

int cmd_curate_export(const CommonFlags& f, bool allow_partial, const std::optional<std::string>& out) {
    const ToolConfig cfg = resolve(f);
    const fs::path root = cfg.data_root;
    const auto manifests = load_split_manifests(root);
    const CurationLog log = load_curation_log(root / kCurationLogName, cfg.roster);
    const CurationResult r = apply_curation(manifests, log, {allow_partial, 3});
    for (const auto& w : r.warnings) std::fprintf(stderr, "WARNING: %s\n", w.c_str());
    const std::string text = curation_export_json(r).dump(1) + "\n";
    if (out) {
        write_file_text(*out, text);
        std::printf("removed %zu views and %zu solids; export written to %s\n", r.removed_views.size(),
                    r.removed_solids.size(), out->c_str());
    } else {
        std::fputs(text.c_str(), stdout);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic hidden-wireframe dataset tools"};
    app.require_subcommand(1);

    CommonFlags gen_flags;
    auto* gen = app.add_subcommand("generate", "generate a dataset under the data root");
    add_common(gen, gen_flags);
    gen->add_option("--solids", gen_flags.overrides.solids, "number of solids");
    gen->add_option("--views", gen_flags.overrides.views, "viewpoints sampled per solid");
    gen->add_option("--split-ratio", gen_flags.overrides.split_ratio, "fraction of solids in the training split");
    bool write_depth = false;
    gen->add_flag("--write-depth", write_depth, "also write depth.bin per sample");

    CommonFlags stats_flags;
    std::optional<std::string> stats_json;
    auto* stats = app.add_subcommand("stats", "per-split label statistics");
    add_common(stats, stats_flags);
    stats->add_option("--json", stats_json, "JSON output path (default <data-root>/stats.json)");

    CommonFlags eval_flags;
    std::string predictions, eval_split = "test", method = "predictions";
    std::optional<std::string> eval_out;
    auto* eval = app.add_subcommand("eval", "score a prediction file against a split");
    add_common(eval, eval_flags);
    eval->add_option("--predictions", predictions, "prediction JSON file")->required();
    eval->add_option("--split", eval_split, "split to evaluate against");
    eval->add_option("--out", eval_out, "report JSON path (default <predictions>.report.json)");
    eval->add_option("--method", method, "row label in the report");

    CommonFlags gtp_flags;
    std::string gtp_split = "test", gtp_out;
    double noise = 0.0;
    auto* gtp = app.add_subcommand("gt-predictions", "write ground truth as a prediction file");
    add_common(gtp, gtp_flags);
    gtp->add_option("--split", gtp_split, "split to read");
    gtp->add_option("--noise", noise, "Gaussian image-plane noise sigma in pixels")->check(CLI::NonNegativeNumber);
    gtp->add_option("--out", gtp_out, "output path")->required();

    CommonFlags oracle_flags;
    std::size_t instances = 1000, oracle_solids = 50;
    int oracle_views = 24;
    std::string fault = "none";
    auto* oracle = app.add_subcommand("oracle-check", "hungarian vs brute force and BVH vs naive sweeps");
    add_common(oracle, oracle_flags);
    oracle->add_option("--instances", instances, "random cost matrices");
    oracle->add_option("--solids", oracle_solids, "solids in the visibility sweep");
    oracle->add_option("--views", oracle_views, "views per solid in the visibility sweep");
    oracle->add_option("--inject-fault", fault, "negative control: none, bvh or hungarian");

    std::optional<std::string> loss_input;
    auto* loss = app.add_subcommand("loss-check", "evaluate the hidden-junction set loss");
    loss->add_option("--input", loss_input, "JSON {predictions:[{x,y,z,c}], targets:[{x,y,z}]}");

    CommonFlags serve_flags;
    bool serve_partial = false;
    auto* serve = app.add_subcommand("curate-serve", "HTTP service for viewpoint curation");
    add_common(serve, serve_flags);
    serve->add_option("--bind", serve_flags.overrides.bind, "host:port");
    serve->add_flag("--allow-partial", serve_partial, "export treats missing votes as keep");

    CommonFlags export_flags;
    bool export_partial = false;
    std::optional<std::string> export_out;
    auto* exp = app.add_subcommand("curate-export", "apply the vote log and print the curated manifests");
    add_common(exp, export_flags);
    exp->add_flag("--allow-partial", export_partial, "treat missing votes as keep");
    exp->add_option("--out", export_out, "write the export here instead of standard output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            if (write_depth) gen_flags.overrides.write_depth = true;
            return cmd_generate(gen_flags);
        }
        if (*stats) return cmd_stats(stats_flags, stats_json);
        if (*eval) return cmd_eval(eval_flags, predictions, eval_split, eval_out, method);
        if (*gtp) return cmd_gt_predictions(gtp_flags, gtp_split, noise, gtp_out);
        if (*oracle) return cmd_oracle_check(oracle_flags, instances, oracle_solids, oracle_views, fault);
        if (*loss) return cmd_loss_check(loss_input);
        if (*serve) return cmd_curate_serve(serve_flags, serve_partial);
        if (*exp) return cmd_curate_export(export_flags, export_partial, export_out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
