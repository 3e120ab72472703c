#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collab/agent/agent.hpp"
#include "collab/agent/profile.hpp"
#include "collab/core/time.hpp"
#include "collab/gen/provider.hpp"
#include "collab/gen/psycholinguistics.hpp"
#include "collab/index/artifact_index.hpp"
#include "collab/index/retrieval.hpp"
#include "collab/service/config.hpp"
#include "collab/service/store.hpp"

namespace collab::service {

struct ServiceDeps {
    gen::GenerationProvider& generation;
    index::EmbeddingProvider& embedding;
    gen::DictionaryConfig dictionary;
    index::FusionConfig fusion;
    Clock clock = system_clock();
    gen::RetryPolicy retry;
};

struct IngestResult {
    Discussion discussion;
    std::size_t utterances = 0;
    bool replaced = false;
    // Derived artifacts dropped because the transcript changed.
    std::vector<std::string> invalidated;
    std::vector<std::string> warnings;
};

struct GenerateResult {
    std::string discussion_id;
    std::optional<ConceptMap> concept_map;
    std::optional<SevenCAssessment> assessment;
    std::optional<PsycholinguisticSeries> metrics;
    // "<artifact>: <message>" per product that failed; those kept their prior state.
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

struct ChatRequest {
    std::string query;
    std::optional<KindSet> allowed_kinds;  // defaults to all three, or transcripts in baseline mode
    bool baseline_mode = false;
    int max_iterations = 8;
};

// Throws Error(invalid_argument) for malformed bodies.
ChatRequest parse_chat_request(const nlohmann::json& body);

struct ChatResponse {
    std::string answer;
    std::vector<agent::Citation> citations;
    agent::AgentTrace trace;
};

nlohmann::json to_json(const ChatResponse& r);
nlohmann::json to_json(const GenerateResult& r);
nlohmann::json to_json(const IngestResult& r);
nlohmann::json search_json(const std::string& query, const index::FusionConfig& cfg,
                           const std::vector<index::SessionHit>& hits);

struct DoctorIssue {
    enum class Severity { warning, error };
    Severity severity = Severity::error;
    std::string path;  // relative to the store root
    std::string message;
};

struct DoctorReport {
    std::vector<DoctorIssue> issues;
    std::vector<std::string> repairs;
    std::size_t discussions = 0;
    std::size_t artifacts = 0;
    std::size_t index_entries = 0;

    bool ok() const;
};

nlohmann::json to_json(const DoctorReport& r);
std::string to_text(const DoctorReport& r);

// Checks the store under `root` from disk: every meta/artifact file decodes and
// validates, no artifact lacks its transcript, every discussion directory is
// registered, and each index collection holds exactly one entry per persisted
// artifact of its kind with the artifact's current text. Leftover temp files are
// warnings. With `repair`, temp files and orphans are removed, unregistered
// discussions with a readable transcript are registered, and the index is
// rebuilt from the store; the report then describes the repaired store.
DoctorReport run_doctor(const std::filesystem::path& root, index::EmbeddingProvider& embedder,
                        bool repair = false, Clock clock = system_clock());

// Binds the store, the index snapshots under <root>/index and the providers.
// Mutations lock their discussion; their short commit phase is exclusive against
// reads, so a chat or search never sees a half-applied change. Reads share.
// Each artifact commit is all-or-nothing: a failure restores the artifact file,
// its index entry and the session metadata to their prior state.
class Service {
public:
    Service(std::filesystem::path root, ServiceDeps deps);

    FileStore& store() { return store_; }
    const FileStore& store() const { return store_; }
    index::Retriever& retriever() { return *retriever_; }
    const index::FusionConfig& fusion() const { return fusion_; }

    // Creates or updates a session; returns true when it was created.
    bool put_session(const Session& s);

    IngestResult ingest_transcript(const std::string& session_id, const std::string& discussion_id,
                                   std::string_view jsonl, std::optional<std::string> group_label = std::nullopt);

    // Throws Error(not_found) without a transcript; per-product failures are reported in the result.
    GenerateResult generate_artifacts(const std::string& discussion_id);

    // Re-embeds every stored artifact; returns the number of indexed documents.
    std::size_t rebuild_index();

    std::vector<index::SessionHit> search(const std::string& query, const index::FusionConfig& cfg) const;
    ChatResponse chat(const ChatRequest& request) const;
    agent::SpeakerProfile speaker_profile(const std::string& speaker_id) const;

    // Readers for the HTTP surface. nullopt when the discussion or artifact is absent.
    std::optional<nlohmann::json> artifact_json(const std::string& discussion_id, StoredFile f) const;

private:
    class Commit;

    std::mutex& discussion_mutex(const std::string& discussion_id);
    void index_document(Commit& c, const std::string& discussion_id, ArtifactKind kind, const std::string& text);
    void resync_snapshots() noexcept;

    FileStore store_;
    gen::GenerationProvider& generation_;
    index::EmbeddingProvider& embedding_;
    gen::DictionaryConfig dictionary_;
    index::FusionConfig fusion_;
    Clock clock_;
    gen::RetryPolicy retry_;
    std::unique_ptr<index::ArtifactIndex> index_;
    std::unique_ptr<index::Retriever> retriever_;

    mutable std::shared_mutex gate_;
    std::mutex locks_mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

// Ingests every discussion listed in a corpus manifest, creating sessions first:
//   {"sessions": [{"session_id", "title", "started_at", "metadata",
//                  "discussions": [{"discussion_id", "group_label", "transcript": "d1.jsonl"}]}]}
// Transcript paths resolve against the manifest's directory.
std::vector<IngestResult> ingest_manifest(Service& service, const std::filesystem::path& manifest);

// Owns providers built from a config together with the service over them.
struct Runtime {
    ServiceConfig config;
    std::unique_ptr<gen::GenerationProvider> generation;
    std::unique_ptr<index::EmbeddingProvider> embedding;
    std::unique_ptr<Service> service;
};

// Config resolution: the explicit path when given, else <root>/config.json when
// present, else defaults (mock generation, hashing embeddings).
std::unique_ptr<Runtime> open_runtime(const std::filesystem::path& root,
                                      const std::optional<std::filesystem::path>& config_path,
                                      const EnvLookup& env = process_env());

}  // namespace collab::service
