#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collab/agent/repository.hpp"
#include "collab/core/types.hpp"

namespace collab::service {

struct ParsedTranscript {
    Transcript transcript;
    std::vector<std::string> warnings;
};

// One {"speaker_id", "start_ms", "end_ms", "text"} object per line; blank lines
// are skipped. Errors name the 1-based line: Error(parse_error, "line 2: ...").
// Utterances out of start_ms order are stably reordered with a warning.
ParsedTranscript parse_transcript_jsonl(std::string_view text, const std::string& discussion_id);
// Canonical JSONL, one utterance per line in index order.
std::string render_transcript_jsonl(const Transcript& t);

// Session and discussion ids double as directory names: 1..128 characters from
// [A-Za-z0-9._-], not starting with '.'. Throws Error(invalid_argument).
void check_store_id(std::string_view what, std::string_view id);

enum class StoredFile { transcript, concept_map, assessment, metrics };
inline constexpr StoredFile kAllStoredFiles[] = {StoredFile::transcript, StoredFile::concept_map,
                                                StoredFile::assessment, StoredFile::metrics};
std::string_view file_name(StoredFile f);  // "transcript.jsonl", "concept_map.json", ...

// File-per-artifact store:
//   <root>/sessions/<session_id>/meta.json
//   <root>/sessions/<session_id>/<discussion_id>/{transcript.jsonl, concept_map.json, assessment.json, metrics.json}
//   <root>/index/<collection>.snap
//   <root>/config.json
// Every write is atomic (temp + rename). Reads take no locks; writers must be
// serialized by the caller.
class FileStore : public agent::Repository {
public:
    // Creates the sessions/ and index/ directories when missing.
    explicit FileStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path sessions_dir() const { return root_ / "sessions"; }
    std::filesystem::path index_dir() const { return root_ / "index"; }
    std::filesystem::path config_path() const { return root_ / "config.json"; }
    std::filesystem::path meta_path(const std::string& session_id) const;
    std::filesystem::path file_path(const Discussion& d, StoredFile f) const;

    std::optional<Session> session(const std::string& session_id) const;
    std::vector<Discussion> discussions(const std::string& session_id) const;
    std::vector<Discussion> all_discussions() const;

    // Creates or updates the session; its discussion list is kept.
    void put_session(const Session& s);
    // Registers or updates a discussion under its (existing) session.
    void put_discussion(const Discussion& d);

    std::optional<std::string> read_bytes(const std::string& discussion_id, StoredFile f) const;
    void write_bytes(const Discussion& d, StoredFile f, std::string_view content);
    void remove_file(const Discussion& d, StoredFile f);
    // Raw meta.json content, for rollback.
    std::optional<std::string> read_meta_bytes(const std::string& session_id) const;
    void write_meta_bytes(const std::string& session_id, std::string_view content);

    std::vector<Session> sessions() const override;
    std::optional<Discussion> discussion(const std::string& id) const override;
    std::optional<Transcript> transcript(const std::string& id) const override;
    std::optional<ConceptMap> concept_map(const std::string& id) const override;
    std::optional<SevenCAssessment> assessment(const std::string& id) const override;
    std::optional<PsycholinguisticSeries> metrics(const std::string& id) const override;

private:
    struct Meta {
        Session session;
        std::vector<Discussion> discussions;
    };
    std::optional<Meta> read_meta(const std::string& session_id) const;
    void write_meta(const Meta& m);

    std::filesystem::path root_;
};

// Decoders shared with the doctor. Throw Error(parse_error) naming the file.
Transcript decode_transcript_file(const std::string& bytes, const std::string& discussion_id);
ConceptMap decode_concept_map_file(const std::string& bytes);
SevenCAssessment decode_assessment_file(const std::string& bytes);
PsycholinguisticSeries decode_metrics_file(const std::string& bytes);

}  // namespace collab::service
