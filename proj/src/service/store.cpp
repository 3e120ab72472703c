#include "collab/service/store.hpp"

#include <algorithm>
#include <set>

#include "collab/core/atomic_file.hpp"
#include "collab/core/error.hpp"
#include "collab/core/json_io.hpp"

namespace collab::service {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ": " + what);
}

std::int64_t millis_field(const json& obj, const char* key, std::size_t line) {
    if (!obj.contains(key)) line_error(line, std::string("missing field \"") + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) line_error(line, std::string("\"") + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

std::string string_field(const json& obj, const char* key, std::size_t line) {
    if (!obj.contains(key)) line_error(line, std::string("missing field \"") + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_string()) line_error(line, std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
}

template <typename T>
T decode(const std::string& bytes, const char* what) {
    try {
        return json::parse(bytes).get<T>();
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, std::string(what) + ": " + e.what());
    } catch (const Error& e) {
        throw Error(Errc::parse_error, std::string(what) + ": " + e.what());
    }
}

std::optional<std::string> read_if_exists(const fs::path& p) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) return std::nullopt;
    return read_file(p);
}

}  // namespace

ParsedTranscript parse_transcript_jsonl(std::string_view text, const std::string& discussion_id) {
    static const std::set<std::string> kFields = {"speaker_id", "start_ms", "end_ms", "text"};
    ParsedTranscript out;
    out.transcript.discussion_id = discussion_id;
    auto& us = out.transcript.utterances;
    std::size_t pos = 0, line_no = 0;
    std::optional<std::size_t> first_disorder;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.ends_with('\r')) line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(line_no, std::string("invalid JSON (") + e.what() + ")");
        }
        if (!obj.is_object()) line_error(line_no, "expected a JSON object");
        for (const auto& [k, v] : obj.items()) {
            if (!kFields.contains(k)) line_error(line_no, "unknown field \"" + k + "\"");
        }
        Utterance u;
        u.speaker_id = string_field(obj, "speaker_id", line_no);
        u.start_ms = millis_field(obj, "start_ms", line_no);
        u.end_ms = millis_field(obj, "end_ms", line_no);
        u.text = string_field(obj, "text", line_no);
        if (u.speaker_id.empty()) line_error(line_no, "\"speaker_id\" must be non-empty");
        if (u.start_ms < 0 || u.end_ms < u.start_ms) line_error(line_no, "need 0 <= start_ms <= end_ms");
        if (!us.empty() && u.start_ms < us.back().start_ms && !first_disorder) first_disorder = line_no;
        us.push_back(std::move(u));
    }
    if (us.empty()) throw Error(Errc::parse_error, "transcript has no utterances");
    if (first_disorder) {
        std::stable_sort(us.begin(), us.end(), [](const Utterance& a, const Utterance& b) { return a.start_ms < b.start_ms; });
        out.warnings.push_back("utterances out of start_ms order (first at line " + std::to_string(*first_disorder) +
                               "); reordered by start_ms");
    }
    for (std::size_t i = 0; i < us.size(); ++i) us[i].index = i;
    return out;
}

std::string render_transcript_jsonl(const Transcript& t) {
    std::string out;
    for (const auto& u : t.utterances) {
        out += canonical_dump(
            json{{"speaker_id", u.speaker_id}, {"start_ms", u.start_ms}, {"end_ms", u.end_ms}, {"text", u.text}});
        out += "\n";
    }
    return out;
}

void check_store_id(std::string_view what, std::string_view id) {
    const bool ok = !id.empty() && id.size() <= 128 && id.front() != '.' &&
                    std::all_of(id.begin(), id.end(), [](char c) {
                        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                               c == '.' || c == '_' || c == '-';
                    });
    if (!ok) {
        throw Error(Errc::invalid_argument, std::string(what) + " \"" + std::string(id) +
                                                "\" must be 1-128 characters of [A-Za-z0-9._-] not starting with '.'");
    }
}

std::string_view file_name(StoredFile f) {
    switch (f) {
        case StoredFile::transcript: return "transcript.jsonl";
        case StoredFile::concept_map: return "concept_map.json";
        case StoredFile::assessment: return "assessment.json";
        case StoredFile::metrics: return "metrics.json";
    }
    return "";
}

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(sessions_dir(), ec);
    if (!ec) fs::create_directories(index_dir(), ec);
    if (ec) throw Error(Errc::io_error, "cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path FileStore::meta_path(const std::string& session_id) const { return sessions_dir() / session_id / "meta.json"; }

fs::path FileStore::file_path(const Discussion& d, StoredFile f) const {
    return sessions_dir() / d.session_id / d.discussion_id / std::string(file_name(f));
}

std::optional<FileStore::Meta> FileStore::read_meta(const std::string& session_id) const {
    const auto bytes = read_if_exists(meta_path(session_id));
    if (!bytes) return std::nullopt;
    try {
        const auto j = json::parse(*bytes);
        Meta m{j.at("session").get<Session>(), j.at("discussions").get<std::vector<Discussion>>()};
        return m;
    } catch (const std::exception& e) {
        throw Error(Errc::parse_error, meta_path(session_id).string() + ": " + e.what());
    }
}

void FileStore::write_meta(const Meta& m) {
    Meta copy = m;
    std::sort(copy.discussions.begin(), copy.discussions.end(),
              [](const Discussion& a, const Discussion& b) { return a.discussion_id < b.discussion_id; });
    copy.session.discussion_ids.clear();
    for (const auto& d : copy.discussions) copy.session.discussion_ids.push_back(d.discussion_id);
    std::error_code ec;
    fs::create_directories(sessions_dir() / copy.session.session_id, ec);
    if (ec) throw Error(Errc::io_error, "cannot create session directory: " + ec.message());
    write_file_atomic(meta_path(copy.session.session_id),
                      pretty_dump(json{{"session", copy.session}, {"discussions", copy.discussions}}));
}

std::optional<Session> FileStore::session(const std::string& session_id) const {
    const auto m = read_meta(session_id);
    if (!m) return std::nullopt;
    return m->session;
}

std::vector<Discussion> FileStore::discussions(const std::string& session_id) const {
    const auto m = read_meta(session_id);
    if (!m) return {};
    return m->discussions;
}

std::vector<Discussion> FileStore::all_discussions() const {
    std::vector<Discussion> out;
    for (const auto& s : sessions()) {
        auto ds = discussions(s.session_id);
        out.insert(out.end(), ds.begin(), ds.end());
    }
    std::sort(out.begin(), out.end(),
              [](const Discussion& a, const Discussion& b) { return a.discussion_id < b.discussion_id; });
    return out;
}

void FileStore::put_session(const Session& s) {
    check_store_id("session id", s.session_id);
    auto m = read_meta(s.session_id).value_or(Meta{});
    m.session = s;
    write_meta(m);
}

void FileStore::put_discussion(const Discussion& d) {
    check_store_id("discussion id", d.discussion_id);
    auto m = read_meta(d.session_id);
    if (!m) throw Error(Errc::not_found, "unknown session " + d.session_id);
    auto it = std::find_if(m->discussions.begin(), m->discussions.end(),
                           [&](const Discussion& x) { return x.discussion_id == d.discussion_id; });
    if (it == m->discussions.end()) {
        m->discussions.push_back(d);
    } else {
        *it = d;
    }
    write_meta(*m);
}

std::optional<std::string> FileStore::read_bytes(const std::string& discussion_id, StoredFile f) const {
    const auto d = discussion(discussion_id);
    if (!d) return std::nullopt;
    return read_if_exists(file_path(*d, f));
}

void FileStore::write_bytes(const Discussion& d, StoredFile f, std::string_view content) {
    const auto p = file_path(d, f);
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + p.parent_path().string() + ": " + ec.message());
    write_file_atomic(p, content);
}

void FileStore::remove_file(const Discussion& d, StoredFile f) {
    std::error_code ec;
    fs::remove(file_path(d, f), ec);
    if (ec) throw Error(Errc::io_error, "cannot remove " + file_path(d, f).string() + ": " + ec.message());
}

std::optional<std::string> FileStore::read_meta_bytes(const std::string& session_id) const {
    return read_if_exists(meta_path(session_id));
}

void FileStore::write_meta_bytes(const std::string& session_id, std::string_view content) {
    write_file_atomic(meta_path(session_id), content);
}

std::vector<Session> FileStore::sessions() const {
    std::vector<Session> out;
    std::error_code ec;
    if (!fs::is_directory(sessions_dir(), ec)) return out;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(sessions_dir(), ec)) {
        if (entry.is_directory()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    for (const auto& n : names) {
        if (auto m = read_meta(n)) out.push_back(std::move(m->session));
    }
    return out;
}

std::optional<Discussion> FileStore::discussion(const std::string& id) const {
    for (const auto& s : sessions()) {
        for (const auto& d : discussions(s.session_id)) {
            if (d.discussion_id == id) return d;
        }
    }
    return std::nullopt;
}

std::optional<Transcript> FileStore::transcript(const std::string& id) const {
    const auto bytes = read_bytes(id, StoredFile::transcript);
    if (!bytes) return std::nullopt;
    return decode_transcript_file(*bytes, id);
}

std::optional<ConceptMap> FileStore::concept_map(const std::string& id) const {
    const auto bytes = read_bytes(id, StoredFile::concept_map);
    if (!bytes) return std::nullopt;
    return decode_concept_map_file(*bytes);
}

std::optional<SevenCAssessment> FileStore::assessment(const std::string& id) const {
    const auto bytes = read_bytes(id, StoredFile::assessment);
    if (!bytes) return std::nullopt;
    return decode_assessment_file(*bytes);
}

std::optional<PsycholinguisticSeries> FileStore::metrics(const std::string& id) const {
    const auto bytes = read_bytes(id, StoredFile::metrics);
    if (!bytes) return std::nullopt;
    return decode_metrics_file(*bytes);
}

Transcript decode_transcript_file(const std::string& bytes, const std::string& discussion_id) {
    try {
        return parse_transcript_jsonl(bytes, discussion_id).transcript;
    } catch (const Error& e) {
        throw Error(Errc::parse_error, "transcript.jsonl: " + std::string(e.what()));
    }
}

ConceptMap decode_concept_map_file(const std::string& bytes) { return decode<ConceptMap>(bytes, "concept_map.json"); }

SevenCAssessment decode_assessment_file(const std::string& bytes) {
    return decode<SevenCAssessment>(bytes, "assessment.json");
}

PsycholinguisticSeries decode_metrics_file(const std::string& bytes) {
    return decode<PsycholinguisticSeries>(bytes, "metrics.json");
}

}  // namespace collab::service
