#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collab/core/types.hpp"

namespace collab::agent {

// Read-only view of stored sessions and artifacts. Implementations must allow
// concurrent reads.
class Repository {
public:
    virtual ~Repository() = default;

    // Ordered by session_id.
    virtual std::vector<Session> sessions() const = 0;
    virtual std::optional<Discussion> discussion(const std::string& discussion_id) const = 0;
    virtual std::optional<Transcript> transcript(const std::string& discussion_id) const = 0;
    virtual std::optional<ConceptMap> concept_map(const std::string& discussion_id) const = 0;
    virtual std::optional<SevenCAssessment> assessment(const std::string& discussion_id) const = 0;
    virtual std::optional<PsycholinguisticSeries> metrics(const std::string& discussion_id) const = 0;
};

// Plain in-memory repository for tests and offline runs. Not synchronized:
// populate it first, then share it read-only.
class MemoryRepository : public Repository {
public:
    void add_session(Session session);
    // Appends the discussion id to its session (which must exist).
    void add_discussion(Discussion discussion);
    void put_transcript(Transcript t);
    void put_concept_map(ConceptMap m);
    void put_assessment(SevenCAssessment a);
    void put_metrics(PsycholinguisticSeries s);

    std::vector<Session> sessions() const override;
    std::optional<Discussion> discussion(const std::string& id) const override;
    std::optional<Transcript> transcript(const std::string& id) const override;
    std::optional<ConceptMap> concept_map(const std::string& id) const override;
    std::optional<SevenCAssessment> assessment(const std::string& id) const override;
    std::optional<PsycholinguisticSeries> metrics(const std::string& id) const override;

private:
    std::map<std::string, Session> sessions_;
    std::map<std::string, Discussion> discussions_;
    std::map<std::string, Transcript> transcripts_;
    std::map<std::string, ConceptMap> maps_;
    std::map<std::string, SevenCAssessment> assessments_;
    std::map<std::string, PsycholinguisticSeries> metrics_;
};

}  // namespace collab::agent
