#ifndef HOWIRE_CURATION_SERVICE_HPP
#define HOWIRE_CURATION_SERVICE_HPP

#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <unistd.h>

#include "httplib.h"

#include "howire/curation.hpp"
#include "howire/dataset.hpp"
#include "howire/image_io.hpp"

namespace howire {

inline constexpr const char* kCurationLogName = "curation.jsonl";
inline const std::vector<std::string> kSplitNames{"train", "test"};

/// Loads whichever split manifests exist under the data root.
inline std::vector<DatasetManifest> load_split_manifests(const fs::path& root) {
    std::vector<DatasetManifest> out;
    for (const auto& split : kSplitNames) {
        const fs::path p = root / split / "manifest.json";
        if (fs::exists(p)) out.push_back(load_manifest(p));
    }
    if (out.empty()) throw IoError("no split manifest under " + root.string());
    return out;
}

inline CurationLog load_curation_log(const fs::path& path, const Roster& roster) {
    if (!fs::exists(path)) return CurationLog(roster);
    return CurationLog::from_jsonl(read_file_text(path), roster);
}

/// Append-only vote file; every append is flushed to stable storage before returning.
class VoteWriter {
public:
    explicit VoteWriter(const fs::path& path) : path_(path) {}

    void append(const Vote& v) {
        const std::string line = vote_to_json(v).dump() + "\n";
        std::FILE* f = std::fopen(path_.c_str(), "ab");
        if (!f) throw IoError("cannot open vote log " + path_.string());
        const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() && std::fflush(f) == 0 &&
                        ::fsync(::fileno(f)) == 0;
        std::fclose(f);
        if (!ok) throw IoError("cannot append to vote log " + path_.string());
    }

private:
    fs::path path_;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Transport-independent reply.
struct ServiceReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;

    static ServiceReply json(const Json& j, int status = 200) { return {status, "application/json", j.dump()}; }
    static ServiceReply error(int status, const std::string& message) {
        return json(Json{{"error", message}}, status);
    }
};

struct CurationServiceOptions {
    bool allow_partial = false;
};

/// State and request handling behind the curation HTTP API.
///
/// Manifests and images are read-only; votes go through one mutex to the
/// in-memory log and the append-only file, in that order after the file write
/// succeeds, so an acknowledged vote is always on disk.
class CurationService {
public:
    CurationService(fs::path data_root, Roster roster = default_roster(), CurationServiceOptions options = {})
        : root_(std::move(data_root)),
          manifests_(load_split_manifests(root_)),
          log_(load_curation_log(root_ / kCurationLogName, roster)),
          writer_(root_ / kCurationLogName),
          options_(options) {
        for (const auto& m : manifests_)
            for (const auto& e : m.samples) {
                views_[e.view_id] = {m.split, e};
                if (!solid_views_.count(e.solid_id)) solid_order_.push_back(e.solid_id);
                solid_views_[e.solid_id].push_back(e.view_id);
            }
    }

    const fs::path& data_root() const { return root_; }

    ServiceReply roster() const { return ServiceReply::json(Json{{"roster", log_.roster()}}); }

    ServiceReply list_solids() const {
        std::lock_guard lock(mutex_);
        Json out = Json::array();
        for (const auto& solid : solid_order_) {
            const auto& views = solid_views_.at(solid);
            std::size_t kept = 0;
            for (const auto& v : views) kept += view_discarded(log_.votes_for(v)) ? 0 : 1;
            out.push_back(Json{{"solid_id", solid}, {"view_count", views.size()}, {"kept_count", kept}});
        }
        return ServiceReply::json(out);
    }

    ServiceReply list_views(const std::string& solid_id) const {
        std::lock_guard lock(mutex_);
        const auto it = solid_views_.find(solid_id);
        if (it == solid_views_.end()) return ServiceReply::error(404, "unknown solid '" + solid_id + "'");
        Json out = Json::array();
        for (const auto& v : it->second) {
            Json votes = Json::object();
            for (const auto& [voter, keep] : log_.votes_for(v)) votes[voter] = keep;
            out.push_back(Json{{"view_id", v},
                               {"split", views_.at(v).split},
                               {"votes", std::move(votes)},
                               {"discarded", view_discarded(log_.votes_for(v))}});
        }
        return ServiceReply::json(out);
    }

    ServiceReply view_image(const std::string& view_id, bool overlay) const {
        const auto it = views_.find(view_id);
        if (it == views_.end()) return ServiceReply::error(404, "unknown view '" + view_id + "'");
        const fs::path split_dir = root_ / it->second.split;
        try {
            if (!overlay) {
                const auto bytes = read_file_bytes(split_dir / it->second.entry.image);
                return {200, "image/png", std::string(bytes.begin(), bytes.end())};
            }
            const DataSample s = deserialize_sample(split_dir / it->second.entry.sample_id);
            RgbImage img = decode_png(s.image_png);
            draw_wireframe_overlay(img, s.wireframe, s.intrinsics);
            const auto bytes = encode_png(img);
            return {200, "image/png", std::string(bytes.begin(), bytes.end())};
        } catch (const Error& e) {
            return ServiceReply::error(500, e.what());
        }
    }

    ServiceReply vote(const std::string& view_id, const std::string& body) {
        if (!views_.count(view_id)) return ServiceReply::error(404, "unknown view '" + view_id + "'");
        Vote v;
        try {
            const Json j = Json::parse(body);
            v.view_id = view_id;
            v.voter = j.at("voter").get<std::string>();
            v.keep = j.at("keep").get<bool>();
        } catch (const nlohmann::json::exception& e) {
            return ServiceReply::error(400, std::string("vote body must be {voter, keep}: ") + e.what());
        }
        if (!log_.on_roster(v.voter)) return ServiceReply::error(400, "voter '" + v.voter + "' is not on the roster");
        v.timestamp = utc_timestamp();

        std::lock_guard lock(mutex_);
        try {
            writer_.append(v);
        } catch (const IoError& e) {
            return ServiceReply::error(500, e.what());
        }
        const bool replaced = log_.record(v);
        Json votes = Json::object();
        for (const auto& [voter, keep] : log_.votes_for(view_id)) votes[voter] = keep;
        Json out{{"view_id", view_id}, {"voter", v.voter}, {"keep", v.keep}, {"votes", std::move(votes)}};
        if (replaced) out["warning"] = "replaced an earlier vote by " + v.voter;
        return ServiceReply::json(out);
    }

    ServiceReply export_curation(bool allow_partial) const {
        std::lock_guard lock(mutex_);
        try {
            const CurationResult r = apply_curation(manifests_, log_, {allow_partial || options_.allow_partial, 3});
            Json out = curation_export_json(r);
            if (!r.warnings.empty()) out["warnings"] = r.warnings;
            return ServiceReply::json(out);
        } catch (const ValidationError& e) {
            return ServiceReply::error(409, e.what());
        }
    }

    /// Registers the API routes on an httplib server.
    void mount(httplib::Server& server) {
        auto send = [](httplib::Response& res, const ServiceReply& r) {
            res.status = r.status;
            res.set_content(r.body, r.content_type.c_str());
        };
        server.Get("/api/roster", [this, send](const httplib::Request&, httplib::Response& res) { send(res, roster()); });
        server.Get("/api/solids", [this, send](const httplib::Request&, httplib::Response& res) { send(res, list_solids()); });
        server.Get(R"(/api/solids/([^/]+)/views)", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, list_views(req.matches[1]));
        });
        server.Get(R"(/api/views/([^/]+)/image\.png)", [this, send](const httplib::Request& req, httplib::Response& res) {
            const bool overlay = req.has_param("overlay") && req.get_param_value("overlay") != "0";
            send(res, view_image(req.matches[1], overlay));
        });
        server.Post(R"(/api/views/([^/]+)/vote)", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, vote(req.matches[1], req.body));
        });
        server.Get("/api/export", [this, send](const httplib::Request& req, httplib::Response& res) {
            const bool partial = req.has_param("allow_partial") && req.get_param_value("allow_partial") != "0";
            send(res, export_curation(partial));
        });
    }

private:
    struct ViewRef {
        std::string split;
        ManifestEntry entry;
    };

    fs::path root_;
    std::vector<DatasetManifest> manifests_;
    CurationLog log_;
    VoteWriter writer_;
    CurationServiceOptions options_;
    std::map<std::string, ViewRef> views_;
    std::vector<std::string> solid_order_;
    std::map<std::string, std::vector<std::string>> solid_views_;
    mutable std::mutex mutex_;
};

} // namespace howire

#endif
