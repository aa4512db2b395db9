#ifndef HOWIRE_CURATION_HPP
#define HOWIRE_CURATION_HPP

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "howire/dataset.hpp"
#include "howire/error.hpp"

namespace howire {

inline constexpr std::size_t kRosterSize = 3;

using Roster = std::array<std::string, kRosterSize>;

inline Roster default_roster() { return {"volunteer1", "volunteer2", "volunteer3"}; }

struct Vote {
    std::string view_id;
    std::string voter;
    bool keep = true;
    std::string timestamp;  // informational; never affects curation outcomes
};

inline Json vote_to_json(const Vote& v) {
    return Json{{"view_id", v.view_id}, {"voter", v.voter}, {"keep", v.keep}, {"timestamp", v.timestamp}};
}

inline Vote vote_from_json(const Json& j) {
    try {
        return {j.at("view_id").get<std::string>(), j.at("voter").get<std::string>(), j.at("keep").get<bool>(),
                j.value("timestamp", "")};
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed vote: ") + e.what());
    }
}

/// Votes keyed by (view, voter); a later vote by the same voter replaces the earlier one.
class CurationLog {
public:
    explicit CurationLog(Roster roster = default_roster()) : roster_(std::move(roster)) {
        if (std::set<std::string>(roster_.begin(), roster_.end()).size() != kRosterSize)
            throw ValidationError("roster must hold three distinct voter ids");
    }

    const Roster& roster() const { return roster_; }

    bool on_roster(const std::string& voter) const {
        return std::find(roster_.begin(), roster_.end(), voter) != roster_.end();
    }

    /// Records a vote; returns true when it replaced an earlier vote by the same voter.
    bool record(const Vote& v) {
        if (!on_roster(v.voter)) throw ValidationError("voter '" + v.voter + "' is not on the roster");
        auto [it, inserted] = votes_.insert_or_assign({v.view_id, v.voter}, v);
        return !inserted;
    }

    /// keep flag per voter for one view.
    std::map<std::string, bool> votes_for(const std::string& view_id) const {
        std::map<std::string, bool> out;
        for (auto it = votes_.lower_bound({view_id, ""}); it != votes_.end() && it->first.first == view_id; ++it)
            out[it->first.second] = it->second.keep;
        return out;
    }

    std::set<std::string> voted_views() const {
        std::set<std::string> out;
        for (const auto& [key, vote] : votes_) out.insert(key.first);
        return out;
    }

    std::size_t size() const { return votes_.size(); }

    /// Replays a JSON-lines vote log (blank lines skipped).
    static CurationLog from_jsonl(const std::string& text, Roster roster = default_roster()) {
        CurationLog log(std::move(roster));
        std::istringstream in(text);
        std::string line;
        std::size_t number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                log.record(vote_from_json(Json::parse(line)));
            } catch (const nlohmann::json::parse_error&) {
                throw FormatError("curation log line " + std::to_string(number) + " is not valid JSON");
            }
        }
        return log;
    }

private:
    Roster roster_;
    std::map<std::pair<std::string, std::string>, Vote> votes_;
};

struct CurationOptions {
    bool allow_partial = false;  // missing votes count as keep
    std::size_t max_views_for_removal = 3;  // solids left with this many views or fewer are removed
};

struct CurationResult {
    std::vector<DatasetManifest> manifests;
    std::vector<std::string> removed_views;
    std::vector<std::string> removed_solids;
    std::vector<std::string> unvoted_views;  // views lacking a full set of votes
    std::vector<std::string> warnings;
};

/// A view is discarded when a majority of the roster votes to discard it.
inline bool view_discarded(const std::map<std::string, bool>& votes) {
    std::size_t discard = 0;
    for (const auto& [voter, keep] : votes) discard += keep ? 0 : 1;
    return 2 * discard > kRosterSize;
}

/// Applies the vote log to the split manifests.
///
/// Views with a discard majority are dropped; a solid left with three or
/// fewer views is dropped entirely. Entry order is preserved, so the output
/// depends only on (manifests, effective votes).
inline CurationResult apply_curation(const std::vector<DatasetManifest>& manifests, const CurationLog& log,
                                     const CurationOptions& options = {}) {
    std::set<std::string> known;
    for (const auto& m : manifests)
        for (const auto& e : m.samples) known.insert(e.view_id);
    for (const auto& view : log.voted_views())
        if (!known.count(view)) throw ValidationError("curation log references unknown view '" + view + "'");

    CurationResult out;
    for (const auto& m : manifests)
        for (const auto& e : m.samples)
            if (log.votes_for(e.view_id).size() < kRosterSize) out.unvoted_views.push_back(e.view_id);
    if (!out.unvoted_views.empty()) {
        if (!options.allow_partial) {
            std::string list;
            for (std::size_t i = 0; i < out.unvoted_views.size() && i < 10; ++i) list += " " + out.unvoted_views[i];
            throw ValidationError(std::to_string(out.unvoted_views.size()) +
                                  " views lack three votes (use allow-partial to treat missing votes as keep):" + list);
        }
        out.warnings.push_back("partial curation: " + std::to_string(out.unvoted_views.size()) +
                               " views lack three votes; missing votes counted as keep");
    }

    for (const auto& m : manifests) {
        std::map<std::string, std::size_t> kept_per_solid;
        std::vector<char> keep(m.samples.size(), 0);
        for (std::size_t i = 0; i < m.samples.size(); ++i) {
            keep[i] = view_discarded(log.votes_for(m.samples[i].view_id)) ? 0 : 1;
            if (keep[i]) ++kept_per_solid[m.samples[i].solid_id];
            else out.removed_views.push_back(m.samples[i].view_id);
        }
        std::set<std::string> removed;
        for (const auto& e : m.samples)
            if (kept_per_solid[e.solid_id] <= options.max_views_for_removal && removed.insert(e.solid_id).second)
                out.removed_solids.push_back(e.solid_id);

        DatasetManifest filtered = m;
        filtered.samples.clear();
        for (std::size_t i = 0; i < m.samples.size(); ++i)
            if (keep[i] && !removed.count(m.samples[i].solid_id)) filtered.samples.push_back(m.samples[i]);
        out.manifests.push_back(std::move(filtered));
    }
    return out;
}

/// Export document: every curated split manifest keyed by split name.
inline Json curation_export_json(const CurationResult& r) {
    Json splits = Json::object();
    for (const auto& m : r.manifests) splits[m.split] = manifest_to_json(m);
    return Json{{"schema_version", kSchemaVersion},
                {"removed_views", r.removed_views},
                {"removed_solids", r.removed_solids},
                {"splits", std::move(splits)}};
}

} // namespace howire

#endif
