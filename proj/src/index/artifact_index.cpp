#include "collab/index/artifact_index.hpp"

#include <algorithm>
#include <mutex>

#include <nlohmann/json.hpp>

#include "collab/core/atomic_file.hpp"
#include "collab/core/error.hpp"

namespace collab::index {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "collab-index";

json record(const IndexedDocument& d) {
    return json{{"doc_id", d.doc_id},
                {"kind", to_string(d.kind)},
                {"discussion_id", d.discussion_id},
                {"text", d.text},
                {"vector", d.vector.values},
                {"indexed_at", format_iso8601(d.indexed_at)}};
}

IndexedDocument parse_record(const json& j, ArtifactKind kind, std::size_t dimension) {
    IndexedDocument d;
    d.doc_id = j.at("doc_id").get<std::string>();
    const auto k = parse_artifact_kind(j.at("kind").get<std::string>());
    if (!k || *k != kind) throw Error(Errc::parse_error, "record kind does not match the collection");
    d.kind = *k;
    d.discussion_id = j.at("discussion_id").get<std::string>();
    if (d.doc_id != make_doc_id(d.discussion_id, kind)) throw Error(Errc::parse_error, "inconsistent doc_id");
    d.text = j.at("text").get<std::string>();
    d.vector = EmbeddingVector::from(j.at("vector").get<std::vector<double>>());
    if (d.vector.dimension() != dimension) throw Error(Errc::parse_error, "record has the wrong dimension");
    d.indexed_at = parse_iso8601(j.at("indexed_at").get<std::string>());
    return d;
}

}  // namespace

std::string make_doc_id(std::string_view discussion_id, ArtifactKind kind) {
    return std::string(discussion_id) + "/" + std::string(to_string(kind));
}

ArtifactIndex::ArtifactIndex(std::size_t dimension, std::optional<fs::path> snapshot_dir)
    : dimension_(dimension), snapshot_dir_(std::move(snapshot_dir)) {
    if (dimension_ == 0) throw Error(Errc::invalid_argument, "index dimension must be positive");
}

fs::path ArtifactIndex::snapshot_path(const fs::path& dir, ArtifactKind kind) {
    return dir / (std::string(to_string(kind)) + ".snap");
}

void ArtifactIndex::upsert(IndexedDocument doc) {
    if (doc.vector.dimension() != dimension_) {
        throw Error(Errc::invalid_argument, "document vector has dimension " + std::to_string(doc.vector.dimension()) +
                                                ", index expects " + std::to_string(dimension_));
    }
    if (doc.text.empty()) throw Error(Errc::invalid_argument, "indexed text must be non-empty");
    doc.doc_id = make_doc_id(doc.discussion_id, doc.kind);
    auto& c = collection(doc.kind);
    std::unique_lock lock(c.mutex);
    auto previous = c.docs.find(doc.discussion_id);
    std::optional<IndexedDocument> old;
    if (previous != c.docs.end()) old = previous->second;
    const auto kind = doc.kind;
    const auto id = doc.discussion_id;
    c.docs.insert_or_assign(id, std::move(doc));
    try {
        persist_locked(kind, c);
    } catch (...) {
        if (old) {
            c.docs.insert_or_assign(id, std::move(*old));
        } else {
            c.docs.erase(id);
        }
        throw;
    }
}

bool ArtifactIndex::erase(ArtifactKind kind, const std::string& discussion_id) {
    auto& c = collection(kind);
    std::unique_lock lock(c.mutex);
    auto it = c.docs.find(discussion_id);
    if (it == c.docs.end()) return false;
    auto old = std::move(it->second);
    c.docs.erase(it);
    try {
        persist_locked(kind, c);
    } catch (...) {
        c.docs.emplace(discussion_id, std::move(old));
        throw;
    }
    return true;
}

void ArtifactIndex::clear(ArtifactKind kind) {
    auto& c = collection(kind);
    std::unique_lock lock(c.mutex);
    auto old = std::move(c.docs);
    c.docs.clear();
    try {
        persist_locked(kind, c);
    } catch (...) {
        c.docs = std::move(old);
        throw;
    }
}

std::optional<IndexedDocument> ArtifactIndex::get(ArtifactKind kind, const std::string& discussion_id) const {
    const auto& c = collection(kind);
    std::shared_lock lock(c.mutex);
    const auto it = c.docs.find(discussion_id);
    if (it == c.docs.end()) return std::nullopt;
    return it->second;
}

std::vector<IndexedDocument> ArtifactIndex::documents(ArtifactKind kind) const {
    const auto& c = collection(kind);
    std::shared_lock lock(c.mutex);
    std::vector<IndexedDocument> out;
    out.reserve(c.docs.size());
    for (const auto& [id, d] : c.docs) out.push_back(d);
    return out;
}

std::size_t ArtifactIndex::size(ArtifactKind kind) const {
    const auto& c = collection(kind);
    std::shared_lock lock(c.mutex);
    return c.docs.size();
}

std::vector<SearchHit> ArtifactIndex::search(const EmbeddingVector& query, ArtifactKind kind, std::size_t k) const {
    if (query.dimension() != dimension_) throw Error(Errc::invalid_argument, "query vector has the wrong dimension");
    std::vector<SearchHit> hits;
    {
        const auto& c = collection(kind);
        std::shared_lock lock(c.mutex);
        hits.reserve(c.docs.size());
        for (const auto& [id, d] : c.docs) hits.push_back({id, kind, cosine(query, d.vector), 0});
    }
    // std::map iteration already yields ascending ids, so a stable sort keeps that as the tie-break.
    std::stable_sort(hits.begin(), hits.end(),
                     [](const SearchHit& a, const SearchHit& b) { return a.similarity > b.similarity; });
    if (hits.size() > k) hits.resize(k);
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
    return hits;
}

std::string ArtifactIndex::snapshot_locked(ArtifactKind kind, const Collection& c) const {
    std::string out = json{{"format", kFormat},
                           {"version", kSnapshotVersion},
                           {"collection", to_string(kind)},
                           {"dimension", dimension_},
                           {"count", c.docs.size()}}
                          .dump();
    out += "\n";
    for (const auto& [id, d] : c.docs) {
        out += record(d).dump();
        out += "\n";
    }
    return out;
}

std::string ArtifactIndex::snapshot(ArtifactKind kind) const {
    const auto& c = collection(kind);
    std::shared_lock lock(c.mutex);
    return snapshot_locked(kind, c);
}

void ArtifactIndex::persist_locked(ArtifactKind kind, const Collection& c) const {
    if (!snapshot_dir_) return;
    write_file_atomic(snapshot_path(*snapshot_dir_, kind), snapshot_locked(kind, c));
}

void ArtifactIndex::save_snapshot(ArtifactKind kind, const fs::path& path) const {
    write_file_atomic(path, snapshot(kind));
}

void ArtifactIndex::load_snapshot(ArtifactKind kind, const fs::path& path) {
    std::map<std::string, IndexedDocument> docs;
    if (fs::exists(path)) {
        const auto body = read_file(path);
        std::size_t pos = 0;
        std::size_t line_no = 0;
        std::optional<std::size_t> expected;
        while (pos < body.size()) {
            const auto end = body.find('\n', pos);
            const auto line = body.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
            pos = end == std::string::npos ? body.size() : end + 1;
            ++line_no;
            if (line.empty()) continue;
            const auto where = path.string() + ":" + std::to_string(line_no);
            try {
                const auto j = json::parse(line);
                if (!expected) {
                    if (j.value("format", "") != kFormat || j.value("version", 0) != kSnapshotVersion) {
                        throw Error(Errc::parse_error, "unsupported snapshot header");
                    }
                    if (j.at("collection").get<std::string>() != to_string(kind)) {
                        throw Error(Errc::parse_error, "snapshot belongs to another collection");
                    }
                    if (j.at("dimension").get<std::size_t>() != dimension_) {
                        throw Error(Errc::parse_error, "snapshot dimension differs from the index");
                    }
                    expected = j.at("count").get<std::size_t>();
                    continue;
                }
                auto d = parse_record(j, kind, dimension_);
                const auto id = d.discussion_id;
                if (!docs.emplace(id, std::move(d)).second) throw Error(Errc::parse_error, "duplicate document " + id);
            } catch (const Error& e) {
                throw Error(Errc::parse_error, where + ": " + e.what());
            } catch (const json::exception& e) {
                throw Error(Errc::parse_error, where + ": " + e.what());
            }
        }
        if (!expected) throw Error(Errc::parse_error, path.string() + ": missing snapshot header");
        if (*expected != docs.size()) {
            throw Error(Errc::parse_error, path.string() + ": header count " + std::to_string(*expected) +
                                               " but " + std::to_string(docs.size()) + " records");
        }
    }
    auto& c = collection(kind);
    std::unique_lock lock(c.mutex);
    c.docs = std::move(docs);
}

}  // namespace collab::index
