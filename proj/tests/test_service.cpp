#include <gtest/gtest.h>

#include <thread>

#include "howire/curation_service.hpp"
#include "support.hpp"

using namespace howire;
using test_support::TempDir;

namespace {

/// Small generated dataset shared by the service tests; each test gets a fresh vote log.
class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir("service");
        DatasetConfig cfg;
        cfg.seed = 8;
        cfg.solids = 3;
        cfg.views = 8;
        cfg.split_ratio = 0.5;
        generate_dataset(cfg, dir_->path());
    }
    static void TearDownTestSuite() { delete dir_; }
    void SetUp() override { std::filesystem::remove(root() / kCurationLogName); }

    static const std::filesystem::path& root() { return dir_->path(); }

    static std::vector<std::string> all_views() {
        std::vector<std::string> out;
        for (const auto& m : load_split_manifests(root()))
            for (const auto& e : m.samples) out.push_back(e.view_id);
        return out;
    }

    static std::string body(const std::string& voter, bool keep) {
        return Json{{"voter", voter}, {"keep", keep}}.dump();
    }

    static TempDir* dir_;
};
TempDir* ServiceTest::dir_ = nullptr;

} // namespace

TEST_F(ServiceTest, ListsSolidsAndViews) {
    CurationService svc(root());
    const ServiceReply solids = svc.list_solids();
    ASSERT_EQ(solids.status, 200);
    const Json j = Json::parse(solids.body);
    ASSERT_EQ(j.size(), 3u);
    const std::string first = j[0]["solid_id"];
    const Json views = Json::parse(svc.list_views(first).body);
    EXPECT_EQ(views.size(), j[0]["view_count"].get<std::size_t>());
    EXPECT_EQ(views[0]["discarded"], false);
    EXPECT_EQ(svc.list_views("solid_9999").status, 404);
    EXPECT_EQ(Json::parse(svc.roster().body)["roster"], Json(default_roster()));
}

TEST_F(ServiceTest, VoteIsPersistedAndUpserted) {
    const std::string view = all_views().front();
    {
        CurationService svc(root());
        const ServiceReply r = svc.vote(view, body("volunteer1", false));
        ASSERT_EQ(r.status, 200) << r.body;
        EXPECT_FALSE(Json::parse(r.body).contains("warning"));
        const ServiceReply again = svc.vote(view, body("volunteer1", true));
        ASSERT_EQ(again.status, 200);
        EXPECT_TRUE(Json::parse(again.body).contains("warning"));
        EXPECT_EQ(Json::parse(again.body)["votes"]["volunteer1"], true);
    }
    const std::string log = read_file_text(root() / kCurationLogName);
    EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 2);
    CurationService reloaded(root());
    const std::string solid = view.substr(1, 4);
    const Json views = Json::parse(reloaded.list_views("solid_" + solid).body);
    EXPECT_EQ(views[0]["votes"]["volunteer1"], true);
}

TEST_F(ServiceTest, VoteValidation) {
    CurationService svc(root());
    const std::string view = all_views().front();
    EXPECT_EQ(svc.vote("s9999_v99", body("volunteer1", true)).status, 404);
    EXPECT_EQ(svc.vote(view, body("mallory", true)).status, 400);
    EXPECT_EQ(svc.vote(view, "{").status, 400);
    EXPECT_EQ(svc.vote(view, R"({"voter": "volunteer1"})").status, 400);
    EXPECT_EQ(svc.vote(view, R"({"voter": "volunteer1", "keep": "yes"})").status, 400);
    EXPECT_FALSE(std::filesystem::exists(root() / kCurationLogName));
}

TEST_F(ServiceTest, ExportRules) {
    CurationService svc(root());
    const auto views = all_views();
    EXPECT_EQ(svc.export_curation(false).status, 409);
    const ServiceReply partial = svc.export_curation(true);
    ASSERT_EQ(partial.status, 200);
    EXPECT_TRUE(Json::parse(partial.body).contains("warnings"));

    for (const auto& v : views)
        for (const auto& voter : default_roster()) ASSERT_EQ(svc.vote(v, body(voter, v != views[0])).status, 200);
    const ServiceReply full = svc.export_curation(false);
    ASSERT_EQ(full.status, 200);
    const Json j = Json::parse(full.body);
    EXPECT_EQ(j["removed_views"], Json::array({views[0]}));
    EXPECT_FALSE(j.contains("warnings"));
    EXPECT_EQ(full.body, CurationService(root()).export_curation(false).body);
}

TEST_F(ServiceTest, ImagesWithAndWithoutOverlay) {
    CurationService svc(root());
    const std::string view = all_views().front();
    const ServiceReply plain = svc.view_image(view, false);
    ASSERT_EQ(plain.status, 200);
    EXPECT_EQ(plain.content_type, "image/png");
    const RgbImage a = decode_png(std::vector<std::uint8_t>(plain.body.begin(), plain.body.end()));
    const ServiceReply over = svc.view_image(view, true);
    ASSERT_EQ(over.status, 200);
    const RgbImage b = decode_png(std::vector<std::uint8_t>(over.body.begin(), over.body.end()));
    EXPECT_EQ(a.width, 256);
    EXPECT_NE(a.pixels, b.pixels);
    EXPECT_EQ(svc.view_image("nope", false).status, 404);
}

TEST_F(ServiceTest, MissingManifestsFailConstruction) {
    TempDir empty("service_empty");
    EXPECT_THROW(CurationService{empty.path()}, IoError);
}

TEST_F(ServiceTest, HttpRoundTrip) {
    CurationService svc(root());
    httplib::Server server;
    svc.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const std::string view = all_views().front();
    auto res = client.Get("/api/solids");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(Json::parse(res->body).size(), 3u);

    res = client.Get("/api/roster");
    ASSERT_TRUE(res);
    EXPECT_EQ(Json::parse(res->body)["roster"].size(), 3u);

    res = client.Get("/api/solids/solid_0000/views");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);

    res = client.Post("/api/views/" + view + "/vote", body("volunteer2", false), "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(Json::parse(res->body)["voter"], "volunteer2");

    res = client.Post("/api/views/" + view + "/vote", body("intruder", false), "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);

    res = client.Get("/api/views/" + view + "/image.png?overlay=1");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");

    res = client.Get("/api/views/missing/image.png");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 404);

    res = client.Get("/api/export");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 409);
    res = client.Get("/api/export?allow_partial=1");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_TRUE(Json::parse(res->body).contains("splits"));

    server.stop();
    thread.join();
}

TEST_F(ServiceTest, ConcurrentVotesAllLand) {
    CurationService svc(root());
    const auto views = all_views();
    std::vector<std::thread> threads;
    for (const auto& voter : default_roster())
        threads.emplace_back([&, voter] {
            for (const auto& v : views) svc.vote(v, body(voter, true));
        });
    for (auto& t : threads) t.join();
    const std::string log = read_file_text(root() / kCurationLogName);
    EXPECT_EQ(static_cast<std::size_t>(std::count(log.begin(), log.end(), '\n')), 3 * views.size());
    EXPECT_EQ(svc.export_curation(false).status, 200);
}
