#include "collab/service/service.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "collab/core/atomic_file.hpp"
#include "collab/core/error.hpp"
#include "collab/core/json_io.hpp"
#include "collab/core/serialize.hpp"
#include "collab/core/validation.hpp"
#include "collab/gen/generator.hpp"

namespace collab::service {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_optional(const fs::path& p) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) return std::nullopt;
    return read_file(p);
}

std::int64_t duration_of(const Transcript& t) {
    std::int64_t first = t.utterances.front().start_ms, last = 0;
    for (const auto& u : t.utterances) {
        first = std::min(first, u.start_ms);
        last = std::max(last, u.end_ms);
    }
    return last - first;
}

std::string artifact_text(const Transcript& t) { return serialize_transcript_text(t); }
std::string artifact_text(const ConceptMap& m) { return serialize_concept_map_text(m); }
std::string artifact_text(const SevenCAssessment& a) { return serialize_assessment_text(a); }

index::IndexedDocument make_document(const std::string& discussion_id, ArtifactKind kind, std::string text,
                                     index::EmbeddingProvider& embedder, const Clock& clock) {
    index::IndexedDocument doc;
    doc.vector = index::embed(text, embedder);
    doc.kind = kind;
    doc.discussion_id = discussion_id;
    doc.doc_id = index::make_doc_id(discussion_id, kind);
    doc.text = std::move(text);
    doc.indexed_at = clock();
    return doc;
}

// Indexable text of every stored artifact, by kind then discussion. Unreadable
// artifacts are skipped (the doctor reports them).
std::map<ArtifactKind, std::map<std::string, std::string>> stored_texts(const FileStore& store) {
    std::map<ArtifactKind, std::map<std::string, std::string>> out;
    for (auto kind : kAllArtifactKinds) out[kind];
    for (const auto& d : store.all_discussions()) {
        std::optional<Transcript> t;
        try {
            t = store.transcript(d.discussion_id);
        } catch (const Error&) {
            continue;
        }
        if (!t) continue;
        out[ArtifactKind::transcript][d.discussion_id] = artifact_text(*t);
        try {
            if (auto m = store.concept_map(d.discussion_id)) {
                out[ArtifactKind::concept_map][d.discussion_id] = artifact_text(*m);
            }
        } catch (const Error&) {
        }
        try {
            if (auto a = store.assessment(d.discussion_id)) {
                out[ArtifactKind::assessment][d.discussion_id] = artifact_text(*a);
            }
        } catch (const Error&) {
        }
    }
    return out;
}

// Writes fresh snapshots for every collection from the store. Each collection
// file is replaced atomically. Returns the number of documents.
std::size_t write_rebuilt_snapshots(const FileStore& store, index::EmbeddingProvider& embedder, const Clock& clock,
                                    index::ArtifactIndex* live) {
    index::ArtifactIndex fresh(embedder.dimension());
    std::size_t count = 0;
    for (const auto& [kind, texts] : stored_texts(store)) {
        for (const auto& [did, text] : texts) {
            fresh.upsert(make_document(did, kind, text, embedder, clock));
            ++count;
        }
    }
    for (auto kind : kAllArtifactKinds) {
        const auto path = index::ArtifactIndex::snapshot_path(store.index_dir(), kind);
        fresh.save_snapshot(kind, path);
        if (live) live->load_snapshot(kind, path);
    }
    return count;
}

std::string rel_path(const fs::path& root, const fs::path& p) { return p.lexically_relative(root).generic_string(); }

}  // namespace

// ---------------------------------------------------------------- requests

ChatRequest parse_chat_request(const json& body) {
    if (!body.is_object()) throw Error(Errc::invalid_argument, "chat request must be a JSON object");
    static const std::set<std::string> kKeys = {"query", "allowed_kinds", "baseline_mode", "max_iterations"};
    for (const auto& [k, v] : body.items()) {
        if (!kKeys.contains(k)) throw Error(Errc::invalid_argument, "chat request: unknown field \"" + k + "\"");
    }
    ChatRequest r;
    if (!body.contains("query") || !body.at("query").is_string()) {
        throw Error(Errc::invalid_argument, "chat request: \"query\" must be a string");
    }
    r.query = body.at("query").get<std::string>();
    if (body.contains("allowed_kinds")) {
        const auto& kinds = body.at("allowed_kinds");
        if (!kinds.is_array()) throw Error(Errc::invalid_argument, "chat request: \"allowed_kinds\" must be an array");
        KindSet set = KindSet::none();
        for (const auto& k : kinds) {
            const auto kind = k.is_string() ? parse_artifact_kind(k.get<std::string>()) : std::nullopt;
            if (!kind) throw Error(Errc::invalid_argument, "chat request: unknown artifact kind " + k.dump());
            set.insert(*kind);
        }
        r.allowed_kinds = set;
    }
    if (body.contains("baseline_mode")) {
        if (!body.at("baseline_mode").is_boolean()) {
            throw Error(Errc::invalid_argument, "chat request: \"baseline_mode\" must be a boolean");
        }
        r.baseline_mode = body.at("baseline_mode").get<bool>();
    }
    if (body.contains("max_iterations")) {
        if (!body.at("max_iterations").is_number_integer()) {
            throw Error(Errc::invalid_argument, "chat request: \"max_iterations\" must be an integer");
        }
        r.max_iterations = body.at("max_iterations").get<int>();
    }
    return r;
}

json to_json(const ChatResponse& r) {
    json citations = json::array();
    for (const auto& c : r.citations) citations.push_back(agent::to_json(c));
    return {{"answer", r.answer}, {"citations", citations}, {"trace", agent::to_json(r.trace)}};
}

json to_json(const GenerateResult& r) {
    json j = {{"discussion_id", r.discussion_id}, {"failures", r.failures}};
    j["concept_map"] = r.concept_map ? json(*r.concept_map) : json(nullptr);
    j["assessment"] = r.assessment ? json(*r.assessment) : json(nullptr);
    j["metrics"] = r.metrics ? json(*r.metrics) : json(nullptr);
    return j;
}

json to_json(const IngestResult& r) {
    return {{"discussion", r.discussion},
            {"utterances", r.utterances},
            {"replaced", r.replaced},
            {"invalidated", r.invalidated},
            {"warnings", r.warnings}};
}

json search_json(const std::string& query, const index::FusionConfig& cfg, const std::vector<index::SessionHit>& hits) {
    json kinds = json::array();
    for (auto k : cfg.allowed_kinds.members()) kinds.push_back(to_string(k));
    json out = json::array();
    for (std::size_t i = 0; i < hits.size(); ++i) {
        json contributions = json::array();
        for (const auto& c : hits[i].contributions) {
            contributions.push_back({{"kind", to_string(c.kind)}, {"rank", c.rank}, {"similarity", c.similarity}});
        }
        out.push_back({{"rank", i + 1},
                       {"discussion_id", hits[i].discussion_id},
                       {"score", hits[i].score},
                       {"contributions", contributions}});
    }
    return {{"query", query}, {"allowed_kinds", kinds}, {"top_n", cfg.top_n}, {"hits", out}};
}

// ---------------------------------------------------------------- commit

// Exclusive section of a mutation. Undo actions are registered before the step
// they undo, so a step that fails after partly taking effect is still reverted.
class Service::Commit {
public:
    explicit Commit(Service& s) : s_(s), lock_(s.gate_) {}
    Commit(const Commit&) = delete;
    Commit& operator=(const Commit&) = delete;

    ~Commit() {
        if (committed_) return;
        for (auto it = undo_.rbegin(); it != undo_.rend(); ++it) {
            try {
                (*it)();
            } catch (...) {
            }
        }
        s_.resync_snapshots();
    }

    void done() { committed_ = true; }

    void write(const Discussion& d, StoredFile f, const std::string& bytes) {
        auto& store = s_.store_;
        const auto old = read_optional(store.file_path(d, f));
        undo_.push_back([&store, d, f, old] {
            if (old) {
                store.write_bytes(d, f, *old);
            } else {
                store.remove_file(d, f);
                std::error_code ec;
                fs::remove(store.file_path(d, f).parent_path(), ec);  // only when left empty
            }
        });
        store.write_bytes(d, f, bytes);
    }

    bool remove(const Discussion& d, StoredFile f) {
        auto& store = s_.store_;
        const auto old = read_optional(store.file_path(d, f));
        if (!old) return false;
        undo_.push_back([&store, d, f, old] { store.write_bytes(d, f, *old); });
        store.remove_file(d, f);
        return true;
    }

    void index(index::IndexedDocument doc) {
        auto& idx = *s_.index_;
        const auto old = idx.get(doc.kind, doc.discussion_id);
        undo_.push_back([&idx, kind = doc.kind, did = doc.discussion_id, old] {
            if (old) {
                idx.upsert(*old);
            } else {
                idx.erase(kind, did);
            }
        });
        idx.upsert(std::move(doc));
    }

    void unindex(ArtifactKind kind, const std::string& discussion_id) {
        auto& idx = *s_.index_;
        const auto old = idx.get(kind, discussion_id);
        if (!old) return;
        undo_.push_back([&idx, old] { idx.upsert(*old); });
        idx.erase(kind, discussion_id);
    }

    void register_discussion(const Discussion& d) {
        auto& store = s_.store_;
        const auto old = store.read_meta_bytes(d.session_id);
        undo_.push_back([&store, sid = d.session_id, old] {
            if (old) store.write_meta_bytes(sid, *old);
        });
        store.put_discussion(d);
    }

    void put_session(const Session& session) {
        auto& store = s_.store_;
        const auto old = store.read_meta_bytes(session.session_id);
        undo_.push_back([&store, sid = session.session_id, old] {
            if (old) {
                store.write_meta_bytes(sid, *old);
            } else {
                std::error_code ec;
                fs::remove_all(store.sessions_dir() / sid, ec);
            }
        });
        store.put_session(session);
    }

private:
    Service& s_;
    std::unique_lock<std::shared_mutex> lock_;
    std::vector<std::function<void()>> undo_;
    bool committed_ = false;
};

// ---------------------------------------------------------------- service

Service::Service(fs::path root, ServiceDeps deps)
    : store_(std::move(root)),
      generation_(deps.generation),
      embedding_(deps.embedding),
      dictionary_(std::move(deps.dictionary)),
      fusion_(deps.fusion),
      clock_(std::move(deps.clock)),
      retry_(deps.retry) {
    fusion_.check();
    index_ = std::make_unique<index::ArtifactIndex>(embedding_.dimension(), store_.index_dir());
    for (auto kind : kAllArtifactKinds) {
        const auto path = index::ArtifactIndex::snapshot_path(store_.index_dir(), kind);
        try {
            index_->load_snapshot(kind, path);
        } catch (const Error& e) {
            throw Error(Errc::config_error, "cannot load index snapshot " + path.string() + ": " + e.what() +
                                                " (run doctor --repair to rebuild)");
        }
    }
    retriever_ = std::make_unique<index::Retriever>(*index_, embedding_, clock_);
}

std::mutex& Service::discussion_mutex(const std::string& discussion_id) {
    std::lock_guard lock(locks_mutex_);
    auto& slot = locks_[discussion_id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

void Service::resync_snapshots() noexcept {
    for (auto kind : kAllArtifactKinds) {
        try {
            index_->save_snapshot(kind, index::ArtifactIndex::snapshot_path(store_.index_dir(), kind));
        } catch (...) {
        }
    }
}

bool Service::put_session(const Session& s) {
    check_store_id("session id", s.session_id);
    Commit c(*this);
    const bool created = !store_.session(s.session_id);
    c.put_session(s);
    c.done();
    return created;
}

IngestResult Service::ingest_transcript(const std::string& session_id, const std::string& discussion_id,
                                        std::string_view jsonl, std::optional<std::string> group_label) {
    check_store_id("session id", session_id);
    check_store_id("discussion id", discussion_id);
    auto parsed = parse_transcript_jsonl(jsonl, discussion_id);
    const auto checked = validate_transcript(parsed.transcript);
    if (!checked.errors.empty()) {
        throw Error(Errc::invalid_argument, "invalid transcript: " + describe(checked.errors));
    }
    std::lock_guard discussion_lock(discussion_mutex(discussion_id));
    if (!store_.session(session_id)) throw Error(Errc::not_found, "unknown session " + session_id);
    const auto existing = store_.discussion(discussion_id);
    if (existing && existing->session_id != session_id) {
        throw Error(Errc::invalid_argument,
                    "discussion " + discussion_id + " already belongs to session " + existing->session_id);
    }
    IngestResult r;
    r.warnings = std::move(parsed.warnings);
    const auto& t = parsed.transcript;
    r.discussion = Discussion{discussion_id, session_id,
                              group_label.value_or(existing ? existing->group_label : discussion_id), duration_of(t)};
    r.utterances = t.utterances.size();
    r.replaced = existing.has_value();
    const auto bytes = render_transcript_jsonl(t);
    const auto previous = existing ? store_.read_bytes(discussion_id, StoredFile::transcript) : std::nullopt;
    const bool changed = !previous || *previous != bytes;
    auto doc = make_document(discussion_id, ArtifactKind::transcript, artifact_text(t), embedding_, clock_);

    Commit c(*this);
    c.write(r.discussion, StoredFile::transcript, bytes);
    c.index(std::move(doc));
    if (existing && changed) {
        // Derived artifacts cite utterance indices of the old transcript.
        for (auto f : {StoredFile::concept_map, StoredFile::assessment, StoredFile::metrics}) {
            if (c.remove(r.discussion, f)) r.invalidated.emplace_back(file_name(f));
        }
        c.unindex(ArtifactKind::concept_map, discussion_id);
        c.unindex(ArtifactKind::assessment, discussion_id);
    }
    c.register_discussion(r.discussion);
    c.done();
    return r;
}

GenerateResult Service::generate_artifacts(const std::string& discussion_id) {
    std::lock_guard discussion_lock(discussion_mutex(discussion_id));
    const auto d = store_.discussion(discussion_id);
    if (!d) throw Error(Errc::not_found, "unknown discussion " + discussion_id);
    const auto t = store_.transcript(discussion_id);
    if (!t) throw Error(Errc::not_found, "discussion " + discussion_id + " has no transcript");

    GenerateResult r;
    r.discussion_id = discussion_id;
    const gen::GenerationOptions options{retry_, clock_};
    auto attempt = [&](const char* name, auto&& produce) {
        try {
            produce();
        } catch (const std::exception& e) {
            r.failures.push_back(std::string(name) + ": " + e.what());
        }
    };
    attempt("concept_map", [&] {
        auto m = gen::generate_concept_map(*t, generation_, options);
        auto doc = make_document(discussion_id, ArtifactKind::concept_map, artifact_text(m), embedding_, clock_);
        Commit c(*this);
        c.write(*d, StoredFile::concept_map, pretty_dump(json(m)));
        c.index(std::move(doc));
        c.done();
        r.concept_map = std::move(m);
    });
    attempt("assessment", [&] {
        auto a = gen::generate_assessment(*t, generation_, options);
        auto doc = make_document(discussion_id, ArtifactKind::assessment, artifact_text(a), embedding_, clock_);
        Commit c(*this);
        c.write(*d, StoredFile::assessment, pretty_dump(json(a)));
        c.index(std::move(doc));
        c.done();
        r.assessment = std::move(a);
    });
    attempt("metrics", [&] {
        auto s = gen::compute_psycholinguistics(*t, dictionary_);
        Commit c(*this);
        c.write(*d, StoredFile::metrics, pretty_dump(json(s)));
        c.done();
        r.metrics = std::move(s);
    });
    return r;
}

std::size_t Service::rebuild_index() {
    std::unique_lock lock(gate_);
    try {
        return write_rebuilt_snapshots(store_, embedding_, clock_, index_.get());
    } catch (...) {
        resync_snapshots();
        throw;
    }
}

std::vector<index::SessionHit> Service::search(const std::string& query, const index::FusionConfig& cfg) const {
    std::shared_lock lock(gate_);
    return retriever_->search_sessions(query, cfg);
}

ChatResponse Service::chat(const ChatRequest& request) const {
    agent::AgentConfig cfg;
    cfg.max_iterations = request.max_iterations;
    cfg.baseline_mode = request.baseline_mode;
    cfg.allowed_kinds = request.allowed_kinds.value_or(
        request.baseline_mode ? KindSet::only(ArtifactKind::transcript) : KindSet::all());
    cfg.fusion = fusion_;
    cfg.fusion.allowed_kinds = cfg.allowed_kinds;
    std::shared_lock lock(gate_);
    const agent::ToolContext ctx{store_, *retriever_};
    ChatResponse r;
    r.trace = agent::run_agent(request.query, cfg, generation_, ctx, agent::RunOptions{retry_});
    r.answer = r.trace.synthesis;
    r.citations = r.trace.citations;
    return r;
}

agent::SpeakerProfile Service::speaker_profile(const std::string& speaker_id) const {
    std::shared_lock lock(gate_);
    return agent::compute_speaker_profile(speaker_id, store_, true);
}

std::optional<json> Service::artifact_json(const std::string& discussion_id, StoredFile f) const {
    std::shared_lock lock(gate_);
    switch (f) {
        case StoredFile::transcript:
            if (auto t = store_.transcript(discussion_id)) return json(*t);
            break;
        case StoredFile::concept_map:
            if (auto m = store_.concept_map(discussion_id)) return json(*m);
            break;
        case StoredFile::assessment:
            if (auto a = store_.assessment(discussion_id)) return json(*a);
            break;
        case StoredFile::metrics:
            if (auto s = store_.metrics(discussion_id)) return json(*s);
            break;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- doctor

bool DoctorReport::ok() const {
    return std::none_of(issues.begin(), issues.end(),
                        [](const DoctorIssue& i) { return i.severity == DoctorIssue::Severity::error; });
}

json to_json(const DoctorReport& r) {
    json issues = json::array();
    for (const auto& i : r.issues) {
        issues.push_back({{"severity", i.severity == DoctorIssue::Severity::error ? "error" : "warning"},
                          {"path", i.path},
                          {"message", i.message}});
    }
    return {{"ok", r.ok()},
            {"issues", issues},
            {"repairs", r.repairs},
            {"discussions", r.discussions},
            {"artifacts", r.artifacts},
            {"index_entries", r.index_entries}};
}

std::string to_text(const DoctorReport& r) {
    std::string out;
    for (const auto& rep : r.repairs) out += "repaired: " + rep + "\n";
    for (const auto& i : r.issues) {
        out += (i.severity == DoctorIssue::Severity::error ? "error: " : "warning: ") + i.path + ": " + i.message + "\n";
    }
    out += std::to_string(r.discussions) + " discussions, " + std::to_string(r.artifacts) + " artifacts, " +
           std::to_string(r.index_entries) + " index entries: " + (r.ok() ? "OK" : "PROBLEMS FOUND") + "\n";
    return out;
}

namespace {

struct DoctorScan {
    fs::path root;
    DoctorReport report;
    // Indexable text of every readable persisted artifact.
    std::map<ArtifactKind, std::map<std::string, std::string>> texts;
    // Files a repair would delete, and discussions it would register.
    std::vector<fs::path> removable;
    std::vector<Discussion> unregistered;
    std::vector<std::pair<std::string, std::string>> dangling;  // (session, discussion) without transcript
    bool unreadable_meta = false;

    void issue(DoctorIssue::Severity s, const fs::path& p, std::string message) {
        report.issues.push_back({s, rel_path(root, p), std::move(message)});
    }
    void error(const fs::path& p, std::string m) { issue(DoctorIssue::Severity::error, p, std::move(m)); }
    void warning(const fs::path& p, std::string m) { issue(DoctorIssue::Severity::warning, p, std::move(m)); }
};

std::vector<fs::directory_entry> sorted_entries(const fs::path& dir) {
    std::vector<fs::directory_entry> out;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec)) out.push_back(e);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path() < b.path(); });
    return out;
}

void scan_discussion(DoctorScan& scan, const fs::path& dir, const std::string& discussion_id) {
    static const std::set<std::string> kKnown = {"transcript.jsonl", "concept_map.json", "assessment.json",
                                                 "metrics.json"};
    for (const auto& e : sorted_entries(dir)) {
        const auto name = e.path().filename().string();
        if (is_temp_file(e.path())) {
            scan.warning(e.path(), "leftover temporary file");
            scan.removable.push_back(e.path());
        } else if (!e.is_regular_file() || !kKnown.contains(name)) {
            scan.error(e.path(), "unexpected entry in discussion directory");
        }
    }
    auto bytes_of = [&](StoredFile f) { return read_optional(dir / std::string(file_name(f))); };
    std::optional<Transcript> t;
    const auto transcript_bytes = bytes_of(StoredFile::transcript);
    if (transcript_bytes) {
        const auto p = dir / "transcript.jsonl";
        try {
            t = decode_transcript_file(*transcript_bytes, discussion_id);
            const auto check = validate_transcript(*t);
            if (!check.errors.empty()) {
                scan.error(p, "invalid transcript: " + describe(check.errors));
                t.reset();
            } else if (render_transcript_jsonl(*t) != *transcript_bytes) {
                scan.warning(p, "transcript is not in canonical form");
            }
        } catch (const Error& e) {
            scan.error(p, e.what());
        }
        if (t) {
            scan.texts[ArtifactKind::transcript][discussion_id] = artifact_text(*t);
            ++scan.report.artifacts;
        } else {
            scan.removable.push_back(p);
        }
    }
    for (auto f : {StoredFile::concept_map, StoredFile::assessment, StoredFile::metrics}) {
        const auto bytes = bytes_of(f);
        if (!bytes) continue;
        const auto p = dir / std::string(file_name(f));
        if (!transcript_bytes) {
            scan.error(p, "orphan artifact: the discussion has no transcript");
            scan.removable.push_back(p);
            continue;
        }
        try {
            std::vector<ValidationError> problems;
            std::string id;
            if (f == StoredFile::concept_map) {
                const auto m = decode_concept_map_file(*bytes);
                id = m.discussion_id;
                problems = t ? validate_concept_map(m, *t) : validate_concept_map(m);
                if (problems.empty()) scan.texts[ArtifactKind::concept_map][discussion_id] = artifact_text(m);
            } else if (f == StoredFile::assessment) {
                const auto a = decode_assessment_file(*bytes);
                id = a.discussion_id;
                problems = validate_assessment(a);
                if (problems.empty()) scan.texts[ArtifactKind::assessment][discussion_id] = artifact_text(a);
            } else {
                const auto s = decode_metrics_file(*bytes);
                id = s.discussion_id;
                if (t && s.values.size() != t->utterances.size()) {
                    problems.push_back({ValidationCode::malformed, "metrics rows do not match utterances"});
                }
            }
            if (id != discussion_id) problems.push_back({ValidationCode::malformed, "discussion_id is " + id});
            if (!problems.empty()) {
                scan.error(p, "invalid artifact: " + describe(problems));
                scan.removable.push_back(p);
            } else {
                ++scan.report.artifacts;
            }
        } catch (const Error& e) {
            scan.error(p, e.what());
            scan.removable.push_back(p);
        }
    }
}

DoctorScan scan_store(const fs::path& root, std::size_t dimension) {
    DoctorScan scan;
    scan.root = root;
    for (auto kind : kAllArtifactKinds) scan.texts[kind];
    const auto sessions = root / "sessions";
    std::error_code ec;
    if (!fs::is_directory(sessions, ec)) {
        scan.error(sessions, "missing sessions directory");
        return scan;
    }
    std::map<std::string, std::string> owner;  // discussion -> session
    for (const auto& se : sorted_entries(sessions)) {
        if (is_temp_file(se.path())) {
            scan.warning(se.path(), "leftover temporary file");
            scan.removable.push_back(se.path());
            continue;
        }
        if (!se.is_directory()) {
            scan.error(se.path(), "unexpected entry in sessions directory");
            continue;
        }
        const auto sid = se.path().filename().string();
        const auto meta_path = se.path() / "meta.json";
        std::vector<Discussion> registered;
        try {
            const auto bytes = read_optional(meta_path);
            if (!bytes) {
                scan.error(meta_path, "missing session metadata");
                continue;
            }
            const auto j = json::parse(*bytes);
            const auto s = j.at("session").get<Session>();
            registered = j.at("discussions").get<std::vector<Discussion>>();
            if (s.session_id != sid) scan.error(meta_path, "session_id " + s.session_id + " does not match directory");
        } catch (const std::exception& e) {
            scan.error(meta_path, std::string("unreadable session metadata: ") + e.what());
            scan.unreadable_meta = true;
            continue;
        }
        std::set<std::string> known;
        for (const auto& d : registered) {
            known.insert(d.discussion_id);
            if (d.session_id != sid) scan.error(meta_path, "discussion " + d.discussion_id + " names another session");
            if (auto [it, fresh] = owner.emplace(d.discussion_id, sid); !fresh) {
                scan.error(meta_path, "discussion " + d.discussion_id + " is also registered in session " + it->second);
            }
        }
        for (const auto& e : sorted_entries(se.path())) {
            const auto name = e.path().filename().string();
            if (name == "meta.json") continue;
            if (is_temp_file(e.path())) {
                scan.warning(e.path(), "leftover temporary file");
                scan.removable.push_back(e.path());
            } else if (!e.is_directory()) {
                scan.error(e.path(), "unexpected entry in session directory");
            } else if (!known.contains(name) && fs::is_empty(e.path(), ec)) {
                scan.warning(e.path(), "empty unregistered discussion directory");
                scan.removable.push_back(e.path());
            } else if (!known.contains(name)) {
                scan.error(e.path(), "discussion directory is not registered in meta.json");
                std::optional<Transcript> t;
                try {
                    if (auto b = read_optional(e.path() / "transcript.jsonl")) t = decode_transcript_file(*b, name);
                } catch (const Error&) {
                }
                if (t && validate_transcript(*t).errors.empty() && !owner.contains(name)) {
                    scan.unregistered.push_back(Discussion{name, sid, name, duration_of(*t)});
                } else {
                    scan.removable.push_back(e.path());
                }
            }
        }
        for (const auto& d : registered) {
            ++scan.report.discussions;
            const auto dir = se.path() / d.discussion_id;
            if (!read_optional(dir / "transcript.jsonl")) {
                scan.error(dir, "registered discussion has no transcript");
                scan.dangling.emplace_back(sid, d.discussion_id);
            }
            if (fs::is_directory(dir, ec)) scan_discussion(scan, dir, d.discussion_id);
        }
    }

    const auto index_dir = root / "index";
    for (const auto& e : sorted_entries(index_dir)) {
        if (is_temp_file(e.path())) {
            scan.warning(e.path(), "leftover temporary file");
            scan.removable.push_back(e.path());
        }
    }
    for (auto kind : kAllArtifactKinds) {
        const auto path = index::ArtifactIndex::snapshot_path(index_dir, kind);
        index::ArtifactIndex idx(dimension);
        try {
            idx.load_snapshot(kind, path);
        } catch (const Error& e) {
            scan.error(path, std::string("unreadable index snapshot: ") + e.what());
            continue;
        }
        const auto& texts = scan.texts[kind];
        for (const auto& doc : idx.documents(kind)) {
            ++scan.report.index_entries;
            const auto it = texts.find(doc.discussion_id);
            if (it == texts.end()) {
                scan.error(path, "index entry " + doc.doc_id + " has no persisted artifact");
            } else if (it->second != doc.text) {
                scan.error(path, "index entry " + doc.doc_id + " is stale (text differs from the stored artifact)");
            }
        }
        for (const auto& [did, text] : texts) {
            if (!idx.get(kind, did)) scan.error(path, "artifact " + index::make_doc_id(did, kind) + " is not indexed");
        }
    }
    return scan;
}

}  // namespace

DoctorReport run_doctor(const fs::path& root, index::EmbeddingProvider& embedder, bool repair, Clock clock) {
    auto scan = scan_store(root, embedder.dimension());
    if (!repair) return scan.report;
    std::vector<std::string> repairs;
    std::error_code ec;
    for (const auto& p : scan.removable) {
        if (fs::remove_all(p, ec) > 0 && !ec) repairs.push_back("removed " + rel_path(root, p));
    }
    if (scan.unreadable_meta) {
        // Sessions cannot be reconstructed, so leave the index for a manual fix.
        auto after = scan_store(root, embedder.dimension()).report;
        repairs.push_back("index not rebuilt: session metadata is unreadable");
        after.repairs = std::move(repairs);
        return after;
    }
    FileStore store(root);
    for (const auto& [sid, did] : scan.dangling) {
        auto bytes = store.read_meta_bytes(sid);
        if (!bytes) continue;
        auto j = json::parse(*bytes);
        auto ds = j.at("discussions").get<std::vector<Discussion>>();
        std::erase_if(ds, [&](const Discussion& d) { return d.discussion_id == did; });
        auto s = j.at("session").get<Session>();
        std::erase(s.discussion_ids, did);
        store.write_meta_bytes(sid, pretty_dump(json{{"session", s}, {"discussions", ds}}));
        fs::remove_all(store.sessions_dir() / sid / did, ec);
        repairs.push_back("unregistered " + did + " (no transcript)");
    }
    for (const auto& d : scan.unregistered) {
        store.put_discussion(d);
        repairs.push_back("registered " + d.discussion_id + " in session " + d.session_id);
    }
    const auto n = write_rebuilt_snapshots(store, embedder, clock, nullptr);
    repairs.push_back("rebuilt index (" + std::to_string(n) + " documents)");
    auto after = scan_store(root, embedder.dimension()).report;
    after.repairs = std::move(repairs);
    return after;
}

// ---------------------------------------------------------------- runtime

std::vector<IngestResult> ingest_manifest(Service& service, const fs::path& manifest) {
    json doc;
    try {
        doc = json::parse(read_file(manifest));
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse_error, manifest.string() + ": " + e.what());
    }
    std::vector<IngestResult> out;
    try {
        for (const auto& sj : doc.at("sessions")) {
            Session s;
            s.session_id = sj.at("session_id").get<std::string>();
            s.title = sj.value("title", s.session_id);
            if (sj.contains("started_at")) s.started_at = parse_iso8601(sj.at("started_at").get<std::string>());
            s.metadata = sj.value("metadata", std::map<std::string, std::string>{});
            service.put_session(s);
            for (const auto& dj : sj.at("discussions")) {
                const auto did = dj.at("discussion_id").get<std::string>();
                const auto file = manifest.parent_path() / dj.at("transcript").get<std::string>();
                std::optional<std::string> label;
                if (dj.contains("group_label")) label = dj.at("group_label").get<std::string>();
                try {
                    out.push_back(service.ingest_transcript(s.session_id, did, read_file(file), label));
                } catch (const Error& e) {
                    throw Error(e.code(), file.string() + ": " + e.what());
                }
            }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, manifest.string() + ": " + e.what());
    }
    return out;
}

std::unique_ptr<Runtime> open_runtime(const fs::path& root, const std::optional<fs::path>& config_path,
                                      const EnvLookup& env) {
    auto rt = std::make_unique<Runtime>();
    std::error_code ec;
    if (config_path) {
        rt->config = load_config(*config_path, env);
    } else if (fs::is_regular_file(root / "config.json", ec)) {
        rt->config = load_config(root / "config.json", env);
    } else {
        rt->config = parse_config(json::object(), root, env);
    }
    rt->generation = make_generation_provider(rt->config.generation);
    rt->embedding = make_embedding_provider(rt->config.embedding);
    rt->service = std::make_unique<Service>(
        root, ServiceDeps{*rt->generation, *rt->embedding, load_configured_dictionary(rt->config), rt->config.fusion,
                          make_clock(rt->config), gen::RetryPolicy{}});
    return rt;
}

}  // namespace collab::service
