#include "collab/agent/profile.hpp"

#include <algorithm>

#include "collab/core/error.hpp"
#include "collab/core/text.hpp"

namespace collab::agent {

using nlohmann::json;

json to_json(const SpeakerProfile& p) {
    json participation = json::array();
    for (const auto& d : p.participation) {
        participation.push_back({{"discussion_id", d.discussion_id},
                                 {"session_id", d.session_id},
                                 {"share", d.share},
                                 {"speaker_tokens", d.speaker_tokens},
                                 {"total_tokens", d.total_tokens}});
    }
    json means = json::object();
    for (const auto& [k, v] : p.psycholinguistic_means) means[k] = v;
    return json{{"speaker_id", p.speaker_id},
                {"sessions", p.sessions},
                {"participation", participation},
                {"concept_contributions",
                 p.concept_contributions ? json(*p.concept_contributions) : json(nullptr)},
                {"psycholinguistic_means", means}};
}

SpeakerProfile compute_speaker_profile(const std::string& speaker_id, const Repository& repo,
                                       bool include_concept_maps) {
    SpeakerProfile p;
    p.speaker_id = speaker_id;
    if (include_concept_maps) p.concept_contributions = 0;
    std::map<std::string, std::pair<double, std::size_t>> sums;

    for (const auto& session : repo.sessions()) {
        bool in_session = false;
        for (const auto& did : session.discussion_ids) {
            const auto t = repo.transcript(did);
            if (!t) continue;
            std::size_t mine = 0, total = 0, mine_utt = 0;
            std::vector<std::size_t> my_rows;
            for (const auto& u : t->utterances) {
                const auto n = text::tokenize(u.text).size();
                total += n;
                if (u.speaker_id == speaker_id) {
                    mine += n;
                    ++mine_utt;
                    my_rows.push_back(u.index);
                }
            }
            if (mine_utt == 0) continue;
            in_session = true;
            DiscussionShare share{did, session.session_id, 0.0, mine, total};
            share.share = total > 0 ? static_cast<double>(mine) / static_cast<double>(total)
                                    : static_cast<double>(mine_utt) / static_cast<double>(t->utterances.size());
            p.participation.push_back(share);

            if (include_concept_maps) {
                if (const auto map = repo.concept_map(did)) {
                    for (const auto& node : map->nodes) {
                        if (std::find(node.speaker_ids.begin(), node.speaker_ids.end(), speaker_id) !=
                            node.speaker_ids.end()) {
                            ++*p.concept_contributions;
                        }
                    }
                }
            }
            if (const auto m = repo.metrics(did)) {
                for (const auto row : my_rows) {
                    if (row >= m->values.size()) continue;
                    for (std::size_t c = 0; c < m->metric_names.size() && c < m->values[row].size(); ++c) {
                        auto& [sum, count] = sums[m->metric_names[c]];
                        sum += m->values[row][c];
                        ++count;
                    }
                }
            }
        }
        if (in_session) p.sessions.push_back(session.session_id);
    }
    if (p.participation.empty()) throw Error(Errc::not_found, "unknown speaker " + speaker_id);
    for (const auto& [name, sc] : sums) p.psycholinguistic_means[name] = sc.first / static_cast<double>(sc.second);
    return p;
}

}  // namespace collab::agent
