#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "collab/core/time.hpp"
#include "collab/core/vocab.hpp"
#include "collab/index/embedding.hpp"

namespace collab::index {

struct IndexedDocument {
    std::string doc_id;  // "<discussion_id>/<kind>"
    ArtifactKind kind = ArtifactKind::transcript;
    std::string discussion_id;
    std::string text;
    EmbeddingVector vector;
    Timestamp indexed_at;

    bool operator==(const IndexedDocument&) const = default;
};

std::string make_doc_id(std::string_view discussion_id, ArtifactKind kind);

struct SearchHit {
    std::string discussion_id;
    ArtifactKind kind = ArtifactKind::transcript;
    double similarity = 0.0;
    std::size_t rank = 0;  // 1-based

    bool operator==(const SearchHit&) const = default;
};

inline constexpr int kSnapshotVersion = 1;

// One collection per ArtifactKind, at most one document per discussion in each.
// Readers share a per-collection lock; writers to one collection are serialized.
// With a snapshot directory, every write rewrites "<dir>/<kind>.snap" atomically
// while still holding the collection's write lock.
class ArtifactIndex {
public:
    explicit ArtifactIndex(std::size_t dimension, std::optional<std::filesystem::path> snapshot_dir = std::nullopt);

    std::size_t dimension() const { return dimension_; }
    const std::optional<std::filesystem::path>& snapshot_dir() const { return snapshot_dir_; }

    // Replaces any existing document for (discussion, kind).
    void upsert(IndexedDocument doc);
    // Returns true when a document was removed.
    bool erase(ArtifactKind kind, const std::string& discussion_id);
    void clear(ArtifactKind kind);

    std::optional<IndexedDocument> get(ArtifactKind kind, const std::string& discussion_id) const;
    // Sorted by discussion_id.
    std::vector<IndexedDocument> documents(ArtifactKind kind) const;
    std::size_t size(ArtifactKind kind) const;

    // Top-k by cosine, ties by ascending discussion_id. Empty collection -> empty list.
    std::vector<SearchHit> search(const EmbeddingVector& query, ArtifactKind kind, std::size_t k) const;

    // Snapshot text of one collection: header line then one record per line.
    std::string snapshot(ArtifactKind kind) const;
    void save_snapshot(ArtifactKind kind, const std::filesystem::path& path) const;
    // Replaces the collection's contents. Throws Error(parse_error) on a malformed
    // file or a dimension/collection mismatch; a missing file leaves the collection empty.
    void load_snapshot(ArtifactKind kind, const std::filesystem::path& path);

    static std::filesystem::path snapshot_path(const std::filesystem::path& dir, ArtifactKind kind);

private:
    struct Collection {
        mutable std::shared_mutex mutex;
        std::map<std::string, IndexedDocument> docs;
    };

    Collection& collection(ArtifactKind kind) { return collections_[static_cast<std::size_t>(kind)]; }
    const Collection& collection(ArtifactKind kind) const { return collections_[static_cast<std::size_t>(kind)]; }
    std::string snapshot_locked(ArtifactKind kind, const Collection& c) const;
    void persist_locked(ArtifactKind kind, const Collection& c) const;

    std::size_t dimension_;
    std::optional<std::filesystem::path> snapshot_dir_;
    std::array<Collection, 3> collections_;
};

}  // namespace collab::index
