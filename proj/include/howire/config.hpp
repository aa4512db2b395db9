#ifndef HOWIRE_CONFIG_HPP
#define HOWIRE_CONFIG_HPP

#include <cstdlib>
#include <optional>
#include <string>

#include "howire/curation.hpp"
#include "howire/dataset.hpp"
#include "howire/error.hpp"

namespace howire {

inline constexpr const char* kDataRootEnv = "HOWIRE_DATA_ROOT";

struct ToolConfig {
    std::string data_root = "data";
    std::uint64_t seed = 42;
    int solids = 100;
    int views = 24;
    double split_ratio = 0.9;
    std::array<int, 3> grid_limits{4, 4, 4};
    int min_voxels = 2;
    int max_voxels = 6;
    CameraIntrinsics intrinsics = CameraIntrinsics::default_256();
    std::string bind = "127.0.0.1:8080";
    Roster roster = default_roster();
    bool write_depth = false;

    void check() const {
        if (data_root.empty()) throw ValidationError("data root must not be empty");
        if (seed == 0) throw ValidationError("seed must be positive");
        if (solids < 1 || views < 1) throw ValidationError("solids and views must be positive");
        if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ValidationError("split ratio must lie in (0, 1)");
        for (int g : grid_limits)
            if (g < 1 || g > kMaxGridDim) throw ValidationError("grid limits must lie in [1, 8]");
        if (min_voxels < 1 || max_voxels < min_voxels) throw ValidationError("bad voxel count range");
        intrinsics.check();
        CurationLog{roster};
        parse_bind();
    }

    std::pair<std::string, int> parse_bind() const {
        const auto colon = bind.rfind(':');
        if (colon == std::string::npos) throw ValidationError("bind address must be host:port");
        int port = 0;
        try {
            port = std::stoi(bind.substr(colon + 1));
        } catch (const std::exception&) {
            throw ValidationError("bind port is not a number");
        }
        if (port < 0 || port > 65535) throw ValidationError("bind port out of range");
        return {bind.substr(0, colon), port};
    }

    DatasetConfig dataset_config() const {
        DatasetConfig c;
        c.seed = seed;
        c.solids = solids;
        c.views = views;
        c.split_ratio = split_ratio;
        c.solid.grid_limits = grid_limits;
        c.solid.min_voxels = min_voxels;
        c.solid.max_voxels = max_voxels;
        c.intrinsics = intrinsics;
        c.write_depth = write_depth;
        return c;
    }
};

/// Values given on the command line; unset fields fall through to lower layers.
struct ConfigOverrides {
    std::optional<std::string> data_root;
    std::optional<std::uint64_t> seed;
    std::optional<int> solids;
    std::optional<int> views;
    std::optional<double> split_ratio;
    std::optional<std::string> bind;
    std::optional<bool> write_depth;
};

/// Applies the keys present in a JSON config document.
inline void apply_config_json(ToolConfig& c, const Json& j) {
    if (!j.is_object()) throw FormatError("config file must hold a JSON object");
    try {
        if (j.contains("data_root")) c.data_root = j["data_root"].get<std::string>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("solids")) c.solids = j["solids"].get<int>();
        if (j.contains("views")) c.views = j["views"].get<int>();
        if (j.contains("split_ratio")) c.split_ratio = j["split_ratio"].get<double>();
        if (j.contains("grid_limits")) c.grid_limits = j["grid_limits"].get<std::array<int, 3>>();
        if (j.contains("min_voxels")) c.min_voxels = j["min_voxels"].get<int>();
        if (j.contains("max_voxels")) c.max_voxels = j["max_voxels"].get<int>();
        if (j.contains("intrinsics")) c.intrinsics = intrinsics_from_json(j["intrinsics"]);
        if (j.contains("bind")) c.bind = j["bind"].get<std::string>();
        if (j.contains("write_depth")) c.write_depth = j["write_depth"].get<bool>();
        if (j.contains("roster")) {
            const auto r = j["roster"].get<std::vector<std::string>>();
            if (r.size() != kRosterSize) throw ValidationError("roster must list exactly three voters");
            std::copy(r.begin(), r.end(), c.roster.begin());
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("config file: ") + e.what());
    }
}

/// Resolves flags > HOWIRE_DATA_ROOT > config file > defaults.
inline ToolConfig resolve_config(const std::optional<fs::path>& config_file, const ConfigOverrides& flags,
                                 const char* env_data_root = std::getenv(kDataRootEnv)) {
    ToolConfig c;
    if (config_file) {
        const std::string text = read_file_text(*config_file);
        Json j;
        try {
            j = Json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError("config file " + config_file->string() + ": " + e.what());
        }
        apply_config_json(c, j);
    }
    if (env_data_root && *env_data_root) c.data_root = env_data_root;
    if (flags.data_root) c.data_root = *flags.data_root;
    if (flags.seed) c.seed = *flags.seed;
    if (flags.solids) c.solids = *flags.solids;
    if (flags.views) c.views = *flags.views;
    if (flags.split_ratio) c.split_ratio = *flags.split_ratio;
    if (flags.bind) c.bind = *flags.bind;
    if (flags.write_depth) c.write_depth = *flags.write_depth;
    c.check();
    return c;
}

} // namespace howire

#endif
