#include "collab/agent/repository.hpp"

#include <algorithm>

#include "collab/core/error.hpp"

namespace collab::agent {

namespace {

template <typename T>
std::optional<T> lookup(const std::map<std::string, T>& m, const std::string& id) {
    const auto it = m.find(id);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

}  // namespace

void MemoryRepository::add_session(Session session) {
    auto id = session.session_id;
    sessions_.insert_or_assign(std::move(id), std::move(session));
}

void MemoryRepository::add_discussion(Discussion discussion) {
    const auto it = sessions_.find(discussion.session_id);
    if (it == sessions_.end()) throw Error(Errc::not_found, "unknown session " + discussion.session_id);
    auto& ids = it->second.discussion_ids;
    if (std::find(ids.begin(), ids.end(), discussion.discussion_id) == ids.end()) {
        ids.push_back(discussion.discussion_id);
    }
    auto id = discussion.discussion_id;
    discussions_.insert_or_assign(std::move(id), std::move(discussion));
}

void MemoryRepository::put_transcript(Transcript t) {
    auto id = t.discussion_id;
    transcripts_.insert_or_assign(std::move(id), std::move(t));
}

void MemoryRepository::put_concept_map(ConceptMap m) {
    auto id = m.discussion_id;
    maps_.insert_or_assign(std::move(id), std::move(m));
}

void MemoryRepository::put_assessment(SevenCAssessment a) {
    auto id = a.discussion_id;
    assessments_.insert_or_assign(std::move(id), std::move(a));
}

void MemoryRepository::put_metrics(PsycholinguisticSeries s) {
    auto id = s.discussion_id;
    metrics_.insert_or_assign(std::move(id), std::move(s));
}

std::vector<Session> MemoryRepository::sessions() const {
    std::vector<Session> out;
    for (const auto& [id, s] : sessions_) out.push_back(s);
    return out;
}

std::optional<Discussion> MemoryRepository::discussion(const std::string& id) const { return lookup(discussions_, id); }
std::optional<Transcript> MemoryRepository::transcript(const std::string& id) const { return lookup(transcripts_, id); }
std::optional<ConceptMap> MemoryRepository::concept_map(const std::string& id) const { return lookup(maps_, id); }
std::optional<SevenCAssessment> MemoryRepository::assessment(const std::string& id) const {
    return lookup(assessments_, id);
}
std::optional<PsycholinguisticSeries> MemoryRepository::metrics(const std::string& id) const {
    return lookup(metrics_, id);
}

}  // namespace collab::agent
