#include <gtest/gtest.h>

#include "howire/config.hpp"
#include "support.hpp"

using namespace howire;
using test_support::TempDir;

namespace {

std::filesystem::path write_config(const TempDir& dir, const std::string& text) {
    const auto path = dir.path() / "config.json";
    write_file_text(path, text);
    return path;
}

} // namespace

TEST(Config, Defaults) {
    const ToolConfig c = resolve_config(std::nullopt, {}, nullptr);
    EXPECT_EQ(c.data_root, "data");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.solids, 100);
    EXPECT_EQ(c.views, 24);
    EXPECT_EQ(c.split_ratio, 0.9);
    EXPECT_EQ(c.roster, default_roster());
    EXPECT_EQ(c.parse_bind(), (std::pair<std::string, int>{"127.0.0.1", 8080}));
}

TEST(Config, PrecedenceFlagsEnvFileDefaults) {
    TempDir tmp("config");
    const auto file = write_config(tmp, R"({"data_root": "from_file", "seed": 7, "views": 12})");

    ToolConfig c = resolve_config(file, {}, nullptr);
    EXPECT_EQ(c.data_root, "from_file");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.views, 12);
    EXPECT_EQ(c.solids, 100);

    c = resolve_config(file, {}, "from_env");
    EXPECT_EQ(c.data_root, "from_env");
    EXPECT_EQ(c.seed, 7u);

    ConfigOverrides flags;
    flags.data_root = "from_flag";
    flags.seed = 9;
    c = resolve_config(file, flags, "from_env");
    EXPECT_EQ(c.data_root, "from_flag");
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.views, 12);

    EXPECT_EQ(resolve_config(std::nullopt, {}, "").data_root, "data");
}

TEST(Config, FileFields) {
    TempDir tmp("config_fields");
    const auto file = write_config(tmp, R"({"grid_limits": [2, 3, 4], "min_voxels": 3, "max_voxels": 5,
        "roster": ["ann", "bo", "cy"], "bind": "0.0.0.0:9000", "write_depth": true,
        "intrinsics": {"fx": 200, "fy": 200, "cx": 64, "cy": 64, "width": 128, "height": 128}})");
    const ToolConfig c = resolve_config(file, {}, nullptr);
    EXPECT_EQ(c.grid_limits, (std::array<int, 3>{2, 3, 4}));
    EXPECT_EQ(c.roster, (Roster{"ann", "bo", "cy"}));
    EXPECT_EQ(c.parse_bind().second, 9000);
    EXPECT_TRUE(c.write_depth);
    const DatasetConfig d = c.dataset_config();
    EXPECT_EQ(d.intrinsics.width, 128);
    EXPECT_EQ(d.solid.max_voxels, 5);
    EXPECT_TRUE(d.write_depth);
}

TEST(Config, RosterMustHoldThree) {
    TempDir tmp("config_roster");
    EXPECT_THROW(resolve_config(write_config(tmp, R"({"roster": ["a", "b"]})"), {}, nullptr), ValidationError);
    EXPECT_THROW(resolve_config(write_config(tmp, R"({"roster": ["a", "b", "b"]})"), {}, nullptr), ValidationError);
}

TEST(Config, RejectsBadValues) {
    TempDir tmp("config_bad");
    EXPECT_THROW(resolve_config(write_config(tmp, "{not json"), {}, nullptr), FormatError);
    EXPECT_THROW(resolve_config(write_config(tmp, "[]"), {}, nullptr), FormatError);
    EXPECT_THROW(resolve_config(write_config(tmp, R"({"seed": "x"})"), {}, nullptr), FormatError);
    EXPECT_THROW(resolve_config(write_config(tmp, R"({"split_ratio": 1.5})"), {}, nullptr), ValidationError);
    EXPECT_THROW(resolve_config(write_config(tmp, R"({"grid_limits": [9, 1, 1]})"), {}, nullptr), ValidationError);
    EXPECT_THROW(resolve_config(tmp.path() / "absent.json", {}, nullptr), IoError);
    ConfigOverrides flags;
    flags.seed = 0;
    EXPECT_THROW(resolve_config(std::nullopt, flags, nullptr), ValidationError);
    flags = {};
    flags.bind = "localhost";
    EXPECT_THROW(resolve_config(std::nullopt, flags, nullptr), ValidationError);
    flags.bind = "localhost:99999";
    EXPECT_THROW(resolve_config(std::nullopt, flags, nullptr), ValidationError);
}
