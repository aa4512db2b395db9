#include <gtest/gtest.h>

#include <sys/wait.h>

#include "howire/dataset.hpp"
#include "support.hpp"

using namespace howire;
using test_support::TempDir;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(HOWIRE_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST(Cli, GenerateStatsEvalPipeline) {
    TempDir tmp("cli_pipeline");
    const std::string root = "--data-root " + quoted(tmp.path());
    RunResult r = run_cli("generate " + root + " --seed 3 --solids 6 --views 8");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_TRUE(std::filesystem::exists(tmp.path() / "train" / "manifest.json"));

    r = run_cli("stats " + root);
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("J_hidden"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(tmp.path() / "stats.json"));

    const auto preds = tmp.path() / "gt.json";
    r = run_cli("gt-predictions " + root + " --split train --out " + quoted(preds));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    r = run_cli("eval " + root + " --split train --predictions " + quoted(preds));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const Json report = Json::parse(read_file_text(preds.string() + ".report.json"));
    for (const auto& t : report["tables"])
        for (const auto& [cls, row] : t["values"].items())
            for (double v : row) EXPECT_NEAR(v, 100.0, 1e-9) << t["name"] << " " << cls;

    // predictions for another split reference unknown ids
    r = run_cli("eval " + root + " --split test --predictions " + quoted(preds));
    EXPECT_EQ(r.exit_code, 3) << r.output;
}

TEST(Cli, GenerateIntoUnwritableRootFails) {
    const RunResult r = run_cli("generate --data-root /proc/howire_cli_test --solids 2");
    EXPECT_EQ(r.exit_code, 2) << r.output;
    EXPECT_FALSE(std::filesystem::exists("/proc/howire_cli_test/train/manifest.json"));
}

TEST(Cli, StatsWithoutManifestFails) {
    TempDir tmp("cli_nomanifest");
    const RunResult r = run_cli("stats --data-root " + quoted(tmp.path()));
    EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST(Cli, BadArgumentsFail) {
    EXPECT_NE(run_cli("generate --solids notanumber").exit_code, 0);
    EXPECT_NE(run_cli("no-such-command").exit_code, 0);
    EXPECT_EQ(run_cli("generate --seed 0 --data-root /tmp/howire_unused").exit_code, 2);
}

TEST(Cli, OracleCheckAndFaultInjection) {
    RunResult r = run_cli("oracle-check --instances 100 --solids 3 --views 6");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    r = run_cli("oracle-check --instances 100 --solids 3 --views 6 --inject-fault hungarian");
    EXPECT_EQ(r.exit_code, 1) << r.output;
    r = run_cli("oracle-check --instances 10 --solids 3 --views 6 --inject-fault bvh");
    EXPECT_EQ(r.exit_code, 1) << r.output;
}

TEST(Cli, LossCheckWorkedExample) {
    const RunResult r = run_cli("loss-check");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("15.233"), std::string::npos) << r.output;
}

TEST(Cli, ExportRefusesPartialVotes) {
    TempDir tmp("cli_export");
    const std::string root = "--data-root " + quoted(tmp.path());
    ASSERT_EQ(run_cli("generate " + root + " --seed 4 --solids 2 --views 6").exit_code, 0);
    EXPECT_EQ(run_cli("curate-export " + root).exit_code, 2);
    const auto out = tmp.path() / "export.json";
    const RunResult r = run_cli("curate-export " + root + " --allow-partial --out " + quoted(out));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_TRUE(Json::parse(read_file_text(out)).contains("splits"));
}

TEST(Cli, GenerationIsDeterministic) {
    TempDir a("cli_det_a"), b("cli_det_b");
    ASSERT_EQ(run_cli("generate --data-root " + quoted(a.path()) + " --seed 12 --solids 3 --views 6").exit_code, 0);
    ASSERT_EQ(run_cli("generate --data-root " + quoted(b.path()) + " --seed 12 --solids 3 --views 6").exit_code, 0);
    std::size_t compared = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
        if (!entry.is_regular_file()) continue;
        const auto rel = std::filesystem::relative(entry.path(), a.path());
        ASSERT_EQ(read_file_bytes(entry.path()), read_file_bytes(b.path() / rel)) << rel;
        ++compared;
    }
    EXPECT_GT(compared, 10u);
}
