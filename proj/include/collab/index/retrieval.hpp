#pragma once

#include <string>
#include <utility>
#include <vector>

#include "collab/core/time.hpp"
#include "collab/core/vocab.hpp"
#include "collab/index/artifact_index.hpp"
#include "collab/index/embedding.hpp"

namespace collab::index {

struct FusionConfig {
    double rrf_k = 60.0;
    std::size_t top_n = 10;
    KindSet allowed_kinds = KindSet::all();

    // Throws Error(invalid_argument) unless rrf_k > 0, top_n >= 1 and allowed_kinds is non-empty.
    void check() const;
};

struct FusedResult {
    std::string discussion_id;
    double score = 0.0;
};

// score(d) = sum over lists containing d of 1 / (rrf_k + rank), ranks 1-based.
// Sorted by score descending, then discussion_id ascending; truncated to top_n.
// Each document's terms are summed smallest-first, so the result does not depend
// on the order the lists are given in. Scores within 1e-12 (relative) count as tied.
// Throws Error(invalid_argument) when a list repeats an id.
std::vector<FusedResult> rrf_fuse(const std::vector<std::vector<std::string>>& lists, const FusionConfig& cfg);

struct Contribution {
    ArtifactKind kind = ArtifactKind::transcript;
    std::size_t rank = 0;
    double similarity = 0.0;
};

struct SessionHit {
    std::string discussion_id;
    double score = 0.0;
    std::vector<Contribution> contributions;  // canonical kind order

    std::vector<ArtifactKind> kinds() const;
};

// Embeds and indexes artifacts, and answers per-collection and fused queries.
class Retriever {
public:
    Retriever(ArtifactIndex& index, EmbeddingProvider& embedder, Clock clock = system_clock(),
              WindowLimits limits = {});

    IndexedDocument index_artifact(const std::string& discussion_id, ArtifactKind kind, std::string text);

    std::vector<SearchHit> search_collection(const std::string& query, ArtifactKind kind, std::size_t k) const;

    // Per allowed kind: the top cfg.top_n hits with positive similarity, then RRF
    // over those lists. A document sharing nothing with the query is not a candidate.
    std::vector<SessionHit> search_sessions(const std::string& query, const FusionConfig& cfg) const;

    ArtifactIndex& index() { return index_; }
    const ArtifactIndex& index() const { return index_; }
    EmbeddingProvider& embedder() const { return embedder_; }
    const WindowLimits& limits() const { return limits_; }

private:
    ArtifactIndex& index_;
    EmbeddingProvider& embedder_;
    Clock clock_;
    WindowLimits limits_;
};

}  // namespace collab::index
