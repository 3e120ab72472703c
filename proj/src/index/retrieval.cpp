#include "collab/index/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "collab/core/error.hpp"

namespace collab::index {

void FusionConfig::check() const {
    if (!(rrf_k > 0.0) || !std::isfinite(rrf_k)) throw Error(Errc::invalid_argument, "rrf_k must be positive");
    if (top_n < 1) throw Error(Errc::invalid_argument, "top_n must be at least 1");
    if (allowed_kinds.empty()) throw Error(Errc::invalid_argument, "at least one artifact kind must be allowed");
}

namespace {

bool fused_before(const FusedResult& a, const FusedResult& b) {
    const double scale = std::max(std::abs(a.score), std::abs(b.score));
    if (std::abs(a.score - b.score) > 1e-12 * scale) return a.score > b.score;
    return a.discussion_id < b.discussion_id;
}

}  // namespace

std::vector<FusedResult> rrf_fuse(const std::vector<std::vector<std::string>>& lists, const FusionConfig& cfg) {
    if (!(cfg.rrf_k > 0.0)) throw Error(Errc::invalid_argument, "rrf_k must be positive");
    std::map<std::string, std::vector<double>> terms;
    for (const auto& list : lists) {
        std::set<std::string_view> seen;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!seen.insert(list[i]).second) throw Error(Errc::invalid_argument, "duplicate id in ranked list: " + list[i]);
            terms[list[i]].push_back(1.0 / (cfg.rrf_k + static_cast<double>(i + 1)));
        }
    }
    std::vector<FusedResult> out;
    out.reserve(terms.size());
    for (auto& [id, t] : terms) {
        std::sort(t.begin(), t.end());
        double score = 0.0;
        for (double x : t) score += x;
        out.push_back({id, score});
    }
    std::sort(out.begin(), out.end(), fused_before);
    if (out.size() > cfg.top_n) out.resize(cfg.top_n);
    return out;
}

std::vector<ArtifactKind> SessionHit::kinds() const {
    std::vector<ArtifactKind> out;
    for (const auto& c : contributions) out.push_back(c.kind);
    return out;
}

Retriever::Retriever(ArtifactIndex& index, EmbeddingProvider& embedder, Clock clock, WindowLimits limits)
    : index_(index), embedder_(embedder), clock_(std::move(clock)), limits_(limits) {
    if (embedder_.dimension() != index_.dimension()) {
        throw Error(Errc::config_error, "embedder dimension " + std::to_string(embedder_.dimension()) +
                                            " does not match index dimension " + std::to_string(index_.dimension()));
    }
}

IndexedDocument Retriever::index_artifact(const std::string& discussion_id, ArtifactKind kind, std::string text) {
    if (discussion_id.empty()) throw Error(Errc::invalid_argument, "discussion_id must be non-empty");
    IndexedDocument doc;
    doc.vector = embed(text, embedder_, limits_);
    doc.kind = kind;
    doc.discussion_id = discussion_id;
    doc.doc_id = make_doc_id(discussion_id, kind);
    doc.text = std::move(text);
    doc.indexed_at = clock_();
    index_.upsert(doc);
    return doc;
}

std::vector<SearchHit> Retriever::search_collection(const std::string& query, ArtifactKind kind,
                                                    std::size_t k) const {
    if (index_.size(kind) == 0 || k == 0) return {};
    return index_.search(embed(query, embedder_, limits_), kind, k);
}

std::vector<SessionHit> Retriever::search_sessions(const std::string& query, const FusionConfig& cfg) const {
    cfg.check();
    const auto kinds = cfg.allowed_kinds.members();
    bool any = false;
    for (auto k : kinds) any = any || index_.size(k) > 0;
    if (!any) return {};
    const auto q = embed(query, embedder_, limits_);

    std::vector<std::vector<std::string>> lists;
    std::map<std::string, std::vector<Contribution>> contributions;
    for (auto kind : kinds) {
        const auto hits = index_.search(q, kind, cfg.top_n);
        std::vector<std::string> ids;
        for (const auto& h : hits) {
            if (h.similarity <= 0.0) break;  // sorted: the rest share nothing with the query
            ids.push_back(h.discussion_id);
            contributions[h.discussion_id].push_back({kind, h.rank, h.similarity});
        }
        lists.push_back(std::move(ids));
    }
    std::vector<SessionHit> out;
    for (auto& fused : rrf_fuse(lists, cfg)) {
        out.push_back({fused.discussion_id, fused.score, std::move(contributions[fused.discussion_id])});
    }
    return out;
}

}  // namespace collab::index
