#include <doctest.h>
#include <httplib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <sstream>
#include <thread>

#include "collab/core/error.hpp"
#include "collab/core/json_io.hpp"
#include "collab/core/serialize.hpp"
#include "collab/service/cli.hpp"
#include "collab/service/config.hpp"
#include "collab/service/http.hpp"
#include "collab/service/service.hpp"
#include "collab/service/store.hpp"
#include "service_fixture.hpp"

using namespace collab;
using namespace collab::service;
using collab::testing::FaultAt;
using collab::testing::ServiceHarness;
using collab::testing::TempStore;
using collab::testing::tree_bytes;
namespace fs = std::filesystem;

namespace {

template <typename F>
Errc error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::io_error;
}

template <typename F>
std::string error_text(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "no error";
}

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars](const std::string& k) -> std::optional<std::string> {
        auto it = vars.find(k);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

const std::string kThreeLines =
    R"({"speaker_id": "ana", "start_ms": 0, "end_ms": 900, "text": "We should test the filter first."})" "\n"
    R"({"speaker_id": "ben", "start_ms": 1000, "end_ms": 1900, "text": "Agreed, the charcoal layer matters."})" "\n"
    R"({"speaker_id": "ana", "start_ms": 2000, "end_ms": 2900, "text": "Then we measure the flow rate."})" "\n";

Session session(const std::string& id) {
    Session s;
    s.session_id = id;
    s.title = "Session " + id;
    s.started_at = Timestamp{1767225600000};
    return s;
}

bool has_issue(const DoctorReport& r, const std::string& needle) {
    for (const auto& i : r.issues) {
        if (i.message.find(needle) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("defaults select the offline providers") {
        const auto cfg = parse_config(json::object(), "/base", env_of({}));
        CHECK(cfg.generation.endpoint == "mock");
        CHECK(cfg.embedding.endpoint == "hashing");
        CHECK(cfg.embedding.dimension == 256);
        CHECK(cfg.fusion.rrf_k == 60.0);
        CHECK(cfg.fusion.top_n == 10);
        CHECK_FALSE(cfg.dictionary_path);
        CHECK_FALSE(cfg.fixed_clock_ms);
        CHECK(make_generation_provider(cfg.generation)->tag() == "mock");
        CHECK(make_embedding_provider(cfg.embedding)->dimension() == 256);
    }

    TEST_CASE("full document and relative dictionary path") {
        const auto doc = json::parse(R"({
            "providers": {"generation": {"endpoint": "http://llm.local:9000/v1/generate", "model_tag": "m-1"},
                          "embedding": {"endpoint": "http://emb.local/embed", "dimension": 384}},
            "fusion": {"rrf_k": 30, "top_n": 5},
            "dictionaries": "dicts/demo.json",
            "clock": {"fixed_ms": 42},
            "server": {"host": "0.0.0.0", "port": 9090}})");
        const auto cfg = parse_config(doc, "/etc/collab", env_of({}));
        CHECK(cfg.generation.model_tag == "m-1");
        CHECK(cfg.embedding.dimension == 384);
        CHECK(cfg.fusion.rrf_k == 30.0);
        CHECK(cfg.fusion.top_n == 5);
        CHECK(*cfg.dictionary_path == fs::path("/etc/collab/dicts/demo.json"));
        CHECK(*cfg.fixed_clock_ms == 42);
        CHECK(cfg.server.port == 9090);
        CHECK(make_generation_provider(cfg.generation)->tag() == "m-1");
    }

    TEST_CASE("environment overrides credentials and they are never serialized") {
        const auto doc = json::parse(R"({"providers": {"generation": {"endpoint": "http://h/g", "model_tag": "m",
                                                                     "api_key": "from-file"}}})");
        auto cfg = parse_config(doc, ".", env_of({}));
        CHECK(cfg.generation.api_key == "from-file");
        cfg = parse_config(doc, ".", env_of({{"COLLAB_GENERATION_API_KEY", "from-env"},
                                             {"COLLAB_EMBEDDING_API_KEY", "emb-env"}}));
        CHECK(cfg.generation.api_key == "from-env");
        CHECK(cfg.embedding.api_key == "emb-env");
        CHECK(canonical_dump(to_json(cfg)).find("env") == std::string::npos);
        CHECK(canonical_dump(to_json(cfg)).find("from-file") == std::string::npos);
    }

    TEST_CASE("bad documents") {
        for (const char* bad : {
                 R"({"unknown": 1})",
                 R"({"providers": {"generation": {"endpoint": "ftp://x"}}})",
                 R"({"providers": {"generation": {"endpoint": "http://x/g"}}})",
                 R"({"providers": {"embedding": {"dimension": 0}}})",
                 R"({"providers": {"embedding": {"endpoint": "mock"}}})",
                 R"({"fusion": {"rrf_k": 0}})",
                 R"({"fusion": {"top_n": 0}})",
                 R"({"fusion": {"extra": 1}})",
                 R"({"server": {"port": 70000}})",
                 R"({"dictionaries": 3})",
                 R"([])",
             }) {
            CAPTURE(bad);
            CHECK(error_code([&] { parse_config(json::parse(bad), ".", env_of({})); }) == Errc::config_error);
        }
        CHECK(error_code([] { load_config("/nonexistent/config.json", env_of({})); }) == Errc::config_error);
    }
}

TEST_SUITE("transcript jsonl") {
    TEST_CASE("three lines give three utterances") {
        const auto p = parse_transcript_jsonl(kThreeLines, "d9");
        REQUIRE(p.transcript.utterances.size() == 3);
        CHECK(p.warnings.empty());
        CHECK(p.transcript.discussion_id == "d9");
        CHECK(p.transcript.utterances[2].index == 2);
        CHECK(p.transcript.utterances[1].speaker_id == "ben");
        CHECK(parse_transcript_jsonl(render_transcript_jsonl(p.transcript), "d9").transcript == p.transcript);
    }

    TEST_CASE("errors name the line") {
        std::string bad = kThreeLines;
        bad.replace(bad.find('\n') + 1, 1, "[");
        CHECK(error_text([&] { parse_transcript_jsonl(bad, "d"); }).find("line 2") == 0);
        CHECK(error_code([&] { parse_transcript_jsonl(bad, "d"); }) == Errc::parse_error);
        const std::vector<std::pair<std::string, std::string>> cases = {
            {R"({"speaker_id": "a", "start_ms": 0, "end_ms": 1})", "missing field \"text\""},
            {R"({"speaker_id": "a", "start_ms": "0", "end_ms": 1, "text": "x"})", "\"start_ms\" must be an integer"},
            {R"({"speaker_id": "a", "start_ms": 5, "end_ms": 1, "text": "x"})", "start_ms <= end_ms"},
            {R"({"speaker_id": "", "start_ms": 0, "end_ms": 1, "text": "x"})", "non-empty"},
            {R"({"speaker_id": "a", "start_ms": 0, "end_ms": 1, "text": "x", "speaker": "a"})", "unknown field"},
            {R"(["a"])", "expected a JSON object"},
        };
        for (const auto& [line, message] : cases) {
            const auto text = error_text([&] { parse_transcript_jsonl(kThreeLines + "\n" + line + "\n", "d"); });
            CAPTURE(line);
            CHECK(text.find("line 5") == 0);
            CHECK(text.find(message) != std::string::npos);
        }
        CHECK(error_code([] { parse_transcript_jsonl("\n \n", "d"); }) == Errc::parse_error);
    }

    TEST_CASE("out-of-order timestamps are reordered with a warning") {
        const std::string text =
            R"({"speaker_id": "a", "start_ms": 500, "end_ms": 600, "text": "second"})" "\r\n"
            "\n"
            R"({"speaker_id": "b", "start_ms": 100, "end_ms": 200, "text": "first"})" "\r\n"
            R"({"speaker_id": "c", "start_ms": 500, "end_ms": 700, "text": "third"})";
        const auto p = parse_transcript_jsonl(text, "d");
        REQUIRE(p.transcript.utterances.size() == 3);
        CHECK(p.transcript.utterances[0].text == "first");
        CHECK(p.transcript.utterances[1].text == "second");
        CHECK(p.transcript.utterances[2].text == "third");
        CHECK(p.transcript.utterances[2].index == 2);
        REQUIRE(p.warnings.size() == 1);
        CHECK(p.warnings[0].find("line 3") != std::string::npos);
    }

    TEST_CASE("store ids") {
        check_store_id("id", "d1");
        check_store_id("id", "Group_A-2.v1");
        for (const char* bad : {"", ".", "..", ".hidden", "a/b", "a b", "ü"}) {
            CHECK(error_code([&] { check_store_id("id", bad); }) == Errc::invalid_argument);
        }
        CHECK(error_code([] { check_store_id("id", std::string(129, 'a')); }) == Errc::invalid_argument);
    }
}

TEST_SUITE("ingest") {
    TEST_CASE("3-line transcript becomes a persisted, indexed discussion") {
        ServiceHarness h;
        CHECK(h.svc->put_session(session("s1")));
        const auto r = h.svc->ingest_transcript("s1", "d9", kThreeLines, std::string("Group Z"));
        CHECK(r.utterances == 3);
        CHECK_FALSE(r.replaced);
        CHECK(r.discussion.group_label == "Group Z");
        CHECK(r.discussion.duration_ms == 2900);
        CHECK(fs::exists(h.dir.path / "sessions/s1/d9/transcript.jsonl"));
        CHECK(h.svc->store().transcript("d9")->utterances.size() == 3);
        CHECK(h.svc->store().session("s1")->discussion_ids == std::vector<std::string>{"d9"});
        const auto doc = h.svc->retriever().index().get(ArtifactKind::transcript, "d9");
        REQUIRE(doc);
        CHECK(doc->text == serialize_transcript_text(*h.svc->store().transcript("d9")));
        CHECK(h.doctor().ok());
    }

    TEST_CASE("duplicate ingest replaces and reindexes") {
        ServiceHarness h;
        h.svc->put_session(session("s1"));
        h.svc->ingest_transcript("s1", "d9", kThreeLines);
        h.svc->generate_artifacts("d9");
        const auto same = h.svc->ingest_transcript("s1", "d9", kThreeLines);
        CHECK(same.replaced);
        CHECK(same.invalidated.empty());
        CHECK(h.svc->store().assessment("d9"));

        const std::string changed = kThreeLines + R"({"speaker_id": "ben", "start_ms": 3000, "end_ms": 3500, "text": "Done."})" "\n";
        const auto r = h.svc->ingest_transcript("s1", "d9", changed);
        CHECK(r.replaced);
        CHECK(r.utterances == 4);
        CHECK(r.invalidated == std::vector<std::string>{"concept_map.json", "assessment.json", "metrics.json"});
        CHECK_FALSE(h.svc->store().assessment("d9"));
        CHECK_FALSE(h.svc->retriever().index().get(ArtifactKind::assessment, "d9"));
        CHECK(h.svc->retriever().index().size(ArtifactKind::transcript) == 1);
        CHECK(h.svc->retriever().index().get(ArtifactKind::transcript, "d9")->text.find("Done.") != std::string::npos);
        CHECK(h.doctor().ok());
    }

    TEST_CASE("rejections leave the store untouched") {
        ServiceHarness h;
        h.svc->put_session(session("s1"));
        h.svc->put_session(session("s2"));
        h.svc->ingest_transcript("s1", "d9", kThreeLines);
        const auto before = tree_bytes(h.dir.path);
        CHECK(error_code([&] { h.svc->ingest_transcript("nope", "d1", kThreeLines); }) == Errc::not_found);
        CHECK(error_code([&] { h.svc->ingest_transcript("s2", "d9", kThreeLines); }) == Errc::invalid_argument);
        CHECK(error_code([&] { h.svc->ingest_transcript("s1", "d8", "{}"); }) == Errc::parse_error);
        CHECK(error_code([&] {
                  h.svc->ingest_transcript("s1", "d8", R"({"speaker_id":"a","start_ms":0,"end_ms":1,"text":"  "})");
              }) == Errc::invalid_argument);
        CHECK(error_code([&] { h.svc->ingest_transcript("s1", "../x", kThreeLines); }) == Errc::invalid_argument);
        CHECK(tree_bytes(h.dir.path) == before);
    }

    TEST_CASE("manifest ingest of the fixture corpus") {
        ServiceHarness h;
        const auto results = ingest_manifest(*h.svc, testing::kCorpusManifest);
        REQUIRE(results.size() == 3);
        const auto sessions = h.svc->store().sessions();
        REQUIRE(sessions.size() == 2);
        CHECK(sessions[0].title == "Design studio week 3");
        CHECK(sessions[0].metadata.at("setting") == "classroom");
        CHECK(sessions[0].discussion_ids == std::vector<std::string>{"d1", "d2"});
        CHECK(h.svc->store().discussion("d3")->group_label == "Group C");
        CHECK(h.svc->retriever().index().size(ArtifactKind::transcript) == 3);
    }

    TEST_CASE("a reopened service sees the same index") {
        ServiceHarness h;
        h.load_and_generate();
        const auto before = h.svc->search("charcoal filter", h.svc->fusion());
        h.reopen();
        const auto after = h.svc->search("charcoal filter", h.svc->fusion());
        REQUIRE(before.size() == after.size());
        for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i].discussion_id == after[i].discussion_id);
    }
}

TEST_SUITE("generate") {
    TEST_CASE("mock provider gives three files and three indexed documents") {
        ServiceHarness h;
        h.load_corpus();
        const auto r = h.svc->generate_artifacts("d1");
        CHECK(r.ok());
        for (const char* f : {"concept_map.json", "assessment.json", "metrics.json"}) {
            CHECK(fs::exists(h.dir.path / "sessions/s1/d1" / f));
        }
        const auto& idx = h.svc->retriever().index();
        CHECK(idx.get(ArtifactKind::transcript, "d1"));
        CHECK(idx.get(ArtifactKind::concept_map, "d1")->text == serialize_concept_map_text(*r.concept_map));
        CHECK(idx.get(ArtifactKind::assessment, "d1")->text == serialize_assessment_text(*r.assessment));
        CHECK(*h.svc->store().concept_map("d1") == *r.concept_map);
        CHECK(*h.svc->store().assessment("d1") == *r.assessment);
        CHECK(h.svc->store().metrics("d1")->values.size() == 8);
        CHECK(h.doctor().ok());
    }

    TEST_CASE("regeneration replaces the files") {
        ServiceHarness h(stepping_clock(Timestamp{testing::kFixtureEpoch}, 1000));
        h.load_corpus();
        h.svc->generate_artifacts("d2");
        const auto first = *h.svc->store().read_bytes("d2", StoredFile::assessment);
        h.svc->generate_artifacts("d2");
        const auto second = *h.svc->store().read_bytes("d2", StoredFile::assessment);
        CHECK(first != second);
        CHECK(h.svc->retriever().index().size(ArtifactKind::assessment) == 1);
        CHECK(h.doctor().ok());
    }

    TEST_CASE("unknown discussions") {
        ServiceHarness h;
        CHECK(error_code([&] { h.svc->generate_artifacts("zz"); }) == Errc::not_found);
    }

    TEST_CASE("provider failure mid-way keeps the prior assessment") {
        ServiceHarness h(stepping_clock(Timestamp{testing::kFixtureEpoch}, 1000));
        h.load_and_generate();
        const auto before = tree_bytes(h.dir.path);
        const auto old_doc = *h.svc->retriever().index().get(ArtifactKind::assessment, "d1");
        h.mock.set_handler(gen::PromptKind::assessment, [](const gen::GenerationRequest&) {
            return gen::json_response({{"dimensions", "not a list"}});
        });
        const auto r = h.svc->generate_artifacts("d1");
        REQUIRE(r.failures.size() == 1);
        CHECK(r.failures[0].rfind("assessment: ", 0) == 0);
        CHECK(r.concept_map);
        CHECK(r.metrics);
        const auto after = tree_bytes(h.dir.path);
        CHECK(after.at("sessions/s1/d1/assessment.json") == before.at("sessions/s1/d1/assessment.json"));
        CHECK(after.at("sessions/s1/d1/concept_map.json") != before.at("sessions/s1/d1/concept_map.json"));
        CHECK(*h.svc->retriever().index().get(ArtifactKind::assessment, "d1") == old_doc);
        CHECK(h.doctor().ok());

        h.mock.set_handler(gen::PromptKind::concept_map,
                           [](const gen::GenerationRequest&) -> gen::GenerationResponse { throw gen::ProviderError("down"); });
        const auto r2 = h.svc->generate_artifacts("d2");
        CHECK(r2.failures.size() == 2);
        CHECK(h.doctor().ok());
    }
}

TEST_SUITE("fault injection") {
    TEST_CASE("every write fault during generation rolls back that artifact only") {
        int injected = 0;
        for (auto stage : testing::kAllWriteStages) {
            for (int n = 0;; ++n) {
                ServiceHarness h(stepping_clock(Timestamp{testing::kFixtureEpoch}, 7));
                h.load_and_generate();
                const auto before = tree_bytes(h.dir.path);
                std::map<ArtifactKind, index::IndexedDocument> docs;
                for (auto k : kAllArtifactKinds) docs[k] = *h.svc->retriever().index().get(k, "d1");
                GenerateResult r;
                bool fired = false;
                {
                    FaultAt fault(stage, n);
                    r = h.svc->generate_artifacts("d1");
                    fired = fault.fired();
                }
                if (!fired) break;
                ++injected;
                CAPTURE(static_cast<int>(stage));
                CAPTURE(n);
                REQUIRE(r.failures.size() == 1);
                const auto report = h.doctor();
                CHECK_MESSAGE(report.ok(), to_text(report));
                const auto after = tree_bytes(h.dir.path);
                const std::string failed = r.failures[0].substr(0, r.failures[0].find(':'));
                const std::string file = "sessions/s1/d1/" + failed + ".json";
                CHECK(after.at(file) == before.at(file));
                for (const auto& [path, bytes] : after) CHECK_FALSE(is_temp_file(path));
                if (failed != "metrics") {
                    const auto kind = *parse_artifact_kind(failed);
                    CHECK(*h.svc->retriever().index().get(kind, "d1") == docs[kind]);
                    // A fresh process sees the same state.
                    h.reopen();
                    CHECK(*h.svc->retriever().index().get(kind, "d1") == docs[kind]);
                }
            }
        }
        // 3 files + 2 snapshots, each written once.
        CHECK(injected == 4 * 5);
    }

    TEST_CASE("every write fault during a transcript replacement leaves the store byte-identical") {
        const std::string changed = kThreeLines + R"({"speaker_id": "ben", "start_ms": 3000, "end_ms": 3500, "text": "Done."})" "\n";
        int injected = 0;
        for (auto stage : testing::kAllWriteStages) {
            for (int n = 0;; ++n) {
                ServiceHarness h;
                h.svc->put_session(session("s1"));
                h.svc->ingest_transcript("s1", "d9", kThreeLines);
                h.svc->generate_artifacts("d9");
                const auto before = tree_bytes(h.dir.path);
                bool fired = false;
                {
                    FaultAt fault(stage, n);
                    try {
                        h.svc->ingest_transcript("s1", "d9", changed);
                    } catch (const std::exception&) {
                    }
                    fired = fault.fired();
                }
                if (!fired) break;
                ++injected;
                CAPTURE(static_cast<int>(stage));
                CAPTURE(n);
                CHECK(tree_bytes(h.dir.path) == before);
                CHECK(h.doctor().ok());
                h.reopen();
                CHECK(h.svc->store().assessment("d9"));
                CHECK(h.svc->retriever().index().get(ArtifactKind::assessment, "d9"));
            }
        }
        // Transcript, metadata and the transcript, concept_map and assessment snapshots.
        CHECK(injected == 4 * 5);
    }

    TEST_CASE("a killed process never leaves a half-written artifact readable") {
        for (int kill_at = 1; kill_at <= 40; kill_at += 3) {
            ServiceHarness h(stepping_clock(Timestamp{testing::kFixtureEpoch}, 11));
            h.load_and_generate();
            const auto root = h.dir.path;
            h.svc.reset();
            const pid_t pid = ::fork();
            REQUIRE(pid >= 0);
            if (pid == 0) {
                int count = 0;
                set_write_fault_hook([&](const fs::path&, WriteStage) {
                    if (++count == kill_at) ::kill(::getpid(), SIGKILL);
                });
                h.reopen();
                for (const char* d : {"d1", "d2", "d3"}) h.svc->generate_artifacts(d);
                ::_exit(0);
            }
            int status = 0;
            ::waitpid(pid, &status, 0);
            CAPTURE(kill_at);
            const auto report = h.doctor();
            for (const auto& i : report.issues) {
                CAPTURE(i.path);
                CAPTURE(i.message);
                const bool benign = i.message.find("temporary") != std::string::npos ||
                                    i.message.find("stale") != std::string::npos;
                CHECK(benign);
            }
            const auto repaired = run_doctor(root, h.embedder, true);
            CHECK_MESSAGE(repaired.ok(), to_text(repaired));
            CHECK(repaired.issues.empty());
        }
    }
}

TEST_SUITE("doctor") {
    TEST_CASE("detects each kind of incoherence and repair restores a clean store") {
        ServiceHarness h;
        h.load_and_generate();
        const auto root = h.dir.path;
        CHECK(h.doctor().ok());
        CHECK(h.doctor().artifacts == 12);
        CHECK(h.doctor().index_entries == 9);

        SUBCASE("leftover temp file is only a warning") {
            write_file_atomic(root / "sessions/s1/d1/x.json", "{}");
            fs::rename(root / "sessions/s1/d1/x.json", root / "sessions/s1/d1/assessment.json.tmp.1.2");
            const auto r = h.doctor();
            CHECK(r.ok());
            CHECK(has_issue(r, "temporary"));
        }
        SUBCASE("stale index entry") {
            auto a = *h.svc->store().assessment("d2");
            a.dimensions[0].analysis = "Edited by hand.";
            write_file_atomic(root / "sessions/s1/d2/assessment.json", pretty_dump(json(a)));
            CHECK(has_issue(h.doctor(), "stale"));
        }
        SUBCASE("artifact missing from the index") {
            h.svc->retriever().index().erase(ArtifactKind::concept_map, "d3");
            CHECK(has_issue(h.doctor(), "not indexed"));
        }
        SUBCASE("index entry without an artifact") {
            fs::remove(root / "sessions/s2/d3/assessment.json");
            CHECK(has_issue(h.doctor(), "no persisted artifact"));
        }
        SUBCASE("orphan artifact") {
            fs::remove(root / "sessions/s1/d1/transcript.jsonl");
            const auto r = h.doctor();
            CHECK(has_issue(r, "orphan"));
            CHECK(has_issue(r, "no transcript"));
        }
        SUBCASE("corrupt artifact") {
            write_file_atomic(root / "sessions/s1/d2/concept_map.json", "{\"nodes\": [");
            CHECK(has_issue(h.doctor(), "concept_map.json"));
        }
        SUBCASE("invalid artifact") {
            auto text = collab::read_file(root / "sessions/s1/d2/assessment.json");
            text.replace(text.find("\"score\": "), 11, "\"score\": 999");
            write_file_atomic(root / "sessions/s1/d2/assessment.json", text);
            const auto r = h.doctor();
            CHECK_MESSAGE(has_issue(r, "score"), to_text(r));
        }
        SUBCASE("unregistered discussion directory") {
            fs::create_directories(root / "sessions/s2/d7");
            write_file_atomic(root / "sessions/s2/d7/transcript.jsonl",
                              render_transcript_jsonl(parse_transcript_jsonl(kThreeLines, "d7").transcript));
            CHECK(has_issue(h.doctor(), "not registered"));
        }
        SUBCASE("unreadable snapshot") {
            write_file_atomic(root / "index/assessment.snap", "garbage\n");
            CHECK(has_issue(h.doctor(), "unreadable index snapshot"));
        }
        SUBCASE("unreadable metadata") {
            write_file_atomic(root / "sessions/s2/meta.json", "nope");
            CHECK(has_issue(h.doctor(), "unreadable session metadata"));
        }

        h.svc.reset();
        const auto repaired = run_doctor(root, h.embedder, true);
        if (has_issue(repaired, "unreadable session metadata")) {
            CHECK_FALSE(repaired.ok());
        } else {
            CHECK_MESSAGE(repaired.ok(), to_text(repaired));
            CHECK_MESSAGE(repaired.issues.empty(), to_text(repaired));
            CHECK_FALSE(repaired.repairs.empty());
        }
    }

    TEST_CASE("repair registers a completed but unregistered discussion") {
        ServiceHarness h;
        h.load_corpus();
        fs::create_directories(h.dir.path / "sessions/s2/d7");
        write_file_atomic(h.dir.path / "sessions/s2/d7/transcript.jsonl", kThreeLines);
        const auto r = run_doctor(h.dir.path, h.embedder, true);
        CHECK(r.ok());
        h.reopen();
        CHECK(h.svc->store().discussion("d7")->session_id == "s2");
        CHECK(h.svc->retriever().index().get(ArtifactKind::transcript, "d7"));
    }

    TEST_CASE("rebuild_index reproduces the incrementally built snapshots") {
        ServiceHarness h;
        h.load_and_generate();
        const auto before = tree_bytes(h.dir.path / "index");
        CHECK(h.svc->rebuild_index() == 9);
        CHECK(tree_bytes(h.dir.path / "index") == before);
    }
}

TEST_SUITE("chat and search") {
    TEST_CASE("chat defaults to all kinds and baseline restricts to transcripts") {
        ServiceHarness h;
        h.load_and_generate();
        ChatRequest req;
        req.query = "Which group disagreed about the robot?";
        const auto full = h.svc->chat(req);
        CHECK_FALSE(full.answer.empty());
        CHECK(full.trace.allowed_kinds == KindSet::all());
        bool saw_assessment = false;
        for (const auto& c : full.citations) saw_assessment |= c.kind == ArtifactKind::assessment;
        CHECK(saw_assessment);

        req.baseline_mode = true;
        const auto base = h.svc->chat(req);
        CHECK(base.trace.allowed_kinds == KindSet::only(ArtifactKind::transcript));
        for (const auto& it : base.trace.iterations) {
            for (const auto& r : it.results) {
                if (r.tool == "get_assessment" || r.tool == "get_concept_map") CHECK_FALSE(r.ok);
                if (r.ok) {
                    for (const auto& e : r.evidence) CHECK(e.kind == ArtifactKind::transcript);
                }
            }
        }
        for (const auto& c : base.citations) CHECK(c.kind == ArtifactKind::transcript);

        req.allowed_kinds = KindSet::all();
        CHECK(error_code([&] { h.svc->chat(req); }) == Errc::invalid_argument);
    }

    TEST_CASE("chat request parsing") {
        const auto r = parse_chat_request(json::parse(
            R"({"query": "q", "allowed_kinds": ["transcript", "assessment"], "baseline_mode": false, "max_iterations": 3})"));
        CHECK(r.allowed_kinds == KindSet::only(ArtifactKind::transcript).insert(ArtifactKind::assessment));
        CHECK(r.max_iterations == 3);
        CHECK_FALSE(parse_chat_request(json::parse(R"({"query": "q"})")).allowed_kinds);
        for (const char* bad : {R"({})", R"({"query": 1})", R"({"query": "q", "allowed_kinds": ["x"]})",
                                R"({"query": "q", "allowed_kinds": "transcript"})", R"({"query": "q", "k": 1})",
                                R"({"query": "q", "baseline_mode": "yes"})", R"([])"}) {
            CHECK(error_code([&] { parse_chat_request(json::parse(bad)); }) == Errc::invalid_argument);
        }
    }

    TEST_CASE("concurrent generation and chat keep the store coherent") {
        ServiceHarness h(stepping_clock(Timestamp{testing::kFixtureEpoch}, 1));
        h.load_and_generate();
        std::vector<std::thread> threads;
        std::atomic<int> failures{0};
        for (const char* d : {"d1", "d2", "d3", "d1", "d2"}) {
            threads.emplace_back([&, d] {
                if (!h.svc->generate_artifacts(d).ok()) ++failures;
            });
        }
        for (int i = 0; i < 4; ++i) {
            threads.emplace_back([&] {
                ChatRequest req;
                req.query = "survey questions";
                try {
                    if (h.svc->chat(req).answer.empty()) ++failures;
                    h.svc->search("filter", h.svc->fusion());
                } catch (...) {
                    ++failures;
                }
            });
        }
        for (auto& t : threads) t.join();
        CHECK(failures == 0);
        CHECK(h.doctor().ok());
    }

    TEST_CASE("speaker profile") {
        ServiceHarness h;
        h.load_and_generate();
        const auto p = h.svc->speaker_profile("ana");
        CHECK(p.speaker_id == "ana");
        CHECK_FALSE(p.participation.empty());
        CHECK(error_code([&] { h.svc->speaker_profile("nobody"); }) == Errc::not_found);
    }
}

TEST_SUITE("http") {
    struct Running {
        ServiceHarness h;
        HttpServer server;
        int port = 0;
        std::thread thread;

        Running() : server(*h.svc) {
            port = server.bind("127.0.0.1", 0);
            thread = std::thread([this] { server.listen(); });
            server.wait_until_ready();
        }
        ~Running() {
            server.stop();
            thread.join();
        }
        httplib::Client client() const {
            httplib::Client c("127.0.0.1", port);
            c.set_read_timeout(30, 0);
            return c;
        }
    };

    json body_of(const httplib::Result& r) {
        REQUIRE(r);
        CHECK(r->get_header_value("Content-Type") == "application/json");
        const auto j = json::parse(r->body);
        CHECK(canonical_dump(j) == r->body);
        return j;
    }

    void check_error_shape(const httplib::Result& r, int status) {
        REQUIRE(r);
        CHECK(r->status == status);
        const auto j = body_of(r);
        REQUIRE(j.contains("error"));
        CHECK(j["error"]["code"].is_string());
        CHECK(j["error"]["message"].is_string());
    }

    TEST_CASE("health") {
        Running s;
        auto c = s.client();
        const auto r = c.Get("/health");
        REQUIRE(r);
        CHECK(r->status == 200);
        CHECK(body_of(r) == json{{"status", "ok"}});
        check_error_shape(c.Get("/nowhere"), 404);
    }

    TEST_CASE("ingest, generate, read, search and chat round trip") {
        Running s;
        auto c = s.client();
        auto r = c.Post("/sessions", R"({"session_id": "s1", "title": "Studio", "started_at": "2026-03-02T09:00:00Z",
                                         "metadata": {"room": "b12"}})",
                        "application/json");
        REQUIRE(r);
        CHECK(r->status == 201);
        CHECK(body_of(r)["discussion_ids"] == json::array());
        r = c.Post("/sessions", R"({"session_id": "s1", "title": "Studio 2"})", "application/json");
        CHECK(r->status == 200);

        for (const char* d : {"d1", "d2"}) {
            const auto text = collab::read_file(std::string(COLLAB_DATA_DIR) + "/fixtures/" + d + ".jsonl");
            r = c.Post(std::string("/sessions/s1/discussions/") + d + "/transcript?group_label=Team", text,
                       "application/x-ndjson");
            REQUIRE(r);
            CHECK(r->status == 201);
            const auto j = body_of(r);
            CHECK(j["discussion"]["group_label"] == "Team");
            CHECK(j["utterances"].get<int>() > 0);
        }
        r = c.Post("/sessions/s1/discussions/d1/transcript", kThreeLines.substr(0, 10), "application/x-ndjson");
        check_error_shape(r, 400);
        CHECK(body_of(r)["error"]["message"].get<std::string>().find("line 1") != std::string::npos);
        check_error_shape(c.Post("/sessions/s9/discussions/d5/transcript", kThreeLines, "text/plain"), 404);

        check_error_shape(c.Get("/discussions/d1/assessment"), 404);
        r = c.Post("/discussions/d1/artifacts", "", "application/json");
        REQUIRE(r);
        CHECK(r->status == 200);
        CHECK(body_of(r)["failures"] == json::array());
        c.Post("/discussions/d2/artifacts", "", "application/json");
        check_error_shape(c.Post("/discussions/zz/artifacts", "", "application/json"), 404);

        for (const char* what : {"transcript", "concept-map", "assessment", "metrics"}) {
            r = c.Get(std::string("/discussions/d1/") + what);
            REQUIRE(r);
            CHECK(r->status == 200);
            const auto j = body_of(r);
            CHECK(j["discussion_id"] == "d1");
        }
        CHECK(body_of(c.Get("/discussions/d1/assessment")) == json(*s.h.svc->store().assessment("d1")));
        CHECK(body_of(c.Get("/discussions/d1/concept-map")) == json(*s.h.svc->store().concept_map("d1")));
        check_error_shape(c.Get("/discussions/zz/transcript"), 404);

        r = c.Get("/search?q=robot%20drift%20motor&n=5");
        REQUIRE(r);
        CHECK(r->status == 200);
        auto j = body_of(r);
        REQUIRE_FALSE(j["hits"].empty());
        CHECK(j["hits"][0]["discussion_id"] == "d2");
        CHECK(j["hits"][0]["rank"] == 1);
        CHECK(j["top_n"] == 5);
        r = c.Get("/search?q=robot&kinds=transcript");
        j = body_of(r);
        CHECK(j["allowed_kinds"] == json::array({"transcript"}));
        for (const auto& hit : j["hits"]) {
            for (const auto& con : hit["contributions"]) CHECK(con["kind"] == "transcript");
        }
        check_error_shape(c.Get("/search?q="), 400);
        check_error_shape(c.Get("/search?q=x&kinds=video"), 400);
        check_error_shape(c.Get("/search?q=x&n=0"), 400);
        check_error_shape(c.Get("/search?q=x&n=abc"), 400);

        r = c.Post("/chat", R"({"query": "What did the robot group try?"})", "application/json");
        REQUIRE(r);
        CHECK(r->status == 200);
        j = body_of(r);
        CHECK(j["answer"].is_string());
        CHECK(j["citations"].is_array());
        CHECK(j["trace"]["config"]["baseline_mode"] == false);
        CHECK(j["trace"]["iterations"].size() <= 8);

        r = c.Post("/chat", R"({"query": "What did the robot group try?", "baseline_mode": true})", "application/json");
        j = body_of(r);
        CHECK(j["trace"]["config"]["allowed_kinds"] == json::array({"transcript"}));
        for (const auto& it : j["trace"]["iterations"]) {
            for (const auto& res : it["tool_results"]) {
                if (res["tool"] == "get_assessment" || res["tool"] == "get_concept_map") CHECK(res["ok"] == false);
            }
        }
        for (const auto& cit : j["citations"]) CHECK(cit["kind"] == "transcript");
        check_error_shape(c.Post("/chat", "{", "application/json"), 400);
        check_error_shape(c.Post("/chat", R"({"query": ""})", "application/json"), 400);
        check_error_shape(c.Post("/chat", R"({"query": "q", "max_iterations": 9})", "application/json"), 400);

        r = c.Get("/speakers/dev/profile");
        REQUIRE(r);
        CHECK(r->status == 200);
        CHECK(body_of(r)["speaker_id"] == "dev");
        check_error_shape(c.Get("/speakers/nobody/profile"), 404);
        CHECK(s.h.doctor().ok());
    }

    TEST_CASE("failed generation reports 502 and keeps prior artifacts") {
        Running s;
        s.h.load_corpus();
        s.h.mock.set_handler(gen::PromptKind::concept_map, [](const gen::GenerationRequest&) {
            return gen::json_response({{"nodes", 1}});
        });
        auto c = s.client();
        const auto r = c.Post("/discussions/d3/artifacts", "", "application/json");
        REQUIRE(r);
        CHECK(r->status == 502);
        const auto j = body_of(r);
        CHECK(j["concept_map"].is_null());
        CHECK(j["assessment"].is_object());
        CHECK(j["error"]["code"] == "generation_failed");
        check_error_shape(c.Get("/discussions/d3/concept-map"), 404);
        CHECK(s.h.doctor().ok());
    }

    TEST_CASE("binding a used port fails") {
        Running s;
        HttpServer other(*s.h.svc);
        CHECK(error_code([&] { other.bind("127.0.0.1", s.port); }) == Errc::io_error);
    }
}

TEST_SUITE("cli") {
    struct Cli {
        std::string out, err;
        int code = 0;
    };

    Cli run(std::vector<std::string> args) {
        args.insert(args.begin(), "collab");
        std::ostringstream out, err;
        Cli r;
        r.code = run_cli(args, out, err);
        r.out = out.str();
        r.err = err.str();
        return r;
    }

    TEST_CASE("verbs over a store") {
        TempStore dir("cli");
        const auto store = dir.path.string();
        write_file_atomic(dir.path / "config.json",
                          canonical_dump(json{{"clock", {{"fixed_ms", testing::kFixtureEpoch}}},
                                              {"dictionaries", testing::kDemoDictionary}}));
        auto r = run({"--store", store, "ingest", "--manifest", testing::kCorpusManifest});
        CHECK(r.code == 0);
        CHECK(r.out.find("ingested d3") != std::string::npos);
        r = run({"--store", store, "ingest", "--session", "s9", "--discussion", "d9", "--title", "Extra",
                 std::string(COLLAB_DATA_DIR) + "/fixtures/d2.jsonl"});
        CHECK(r.code == 0);
        r = run({"--store", store, "generate", "--all"});
        CHECK(r.code == 0);
        CHECK(r.out.find("d9: concept_map, assessment, metrics written") != std::string::npos);
        r = run({"--store", store, "search", "charcoal water filter", "-n", "2", "--json"});
        CHECK(r.code == 0);
        const auto hits = json::parse(r.out);
        CHECK(hits["hits"].size() <= 2);
        CHECK(hits["hits"][0]["discussion_id"] == "d1");
        r = run({"--store", store, "search", "robot", "--kinds", "transcript"});
        CHECK(r.out.find("transcript #1") != std::string::npos);
        CHECK(r.out.find("assessment") == std::string::npos);
        const auto trace_file = (dir.path / "trace.json").string();
        r = run({"--store", store, "chat", "Who worked on the survey?", "--baseline", "--trace-out", trace_file});
        CHECK(r.code == 0);
        CHECK(r.out.find("iterations") != std::string::npos);
        CHECK(json::parse(collab::read_file(trace_file))["config"]["baseline_mode"] == true);
        r = run({"--store", store, "index", "rebuild"});
        CHECK(r.out == "indexed 12 documents\n");
        r = run({"--store", store, "doctor"});
        CHECK(r.code == 0);
        CHECK(r.out.find("OK") != std::string::npos);

        fs::remove(dir.path / "sessions/s1/d1/transcript.jsonl");
        r = run({"--store", store, "doctor", "--json"});
        CHECK(r.code == 1);
        CHECK(json::parse(r.out)["ok"] == false);
        r = run({"--store", store, "doctor", "--repair"});
        CHECK(r.code == 0);

        const auto cases = dir.path / "cases.json";
        write_file_atomic(cases, R"([{"query": "robot drifting motor", "category": "direct", "relevant": ["d2", "d9"]}])");
        r = run({"--store", store, "eval", "retrieval", "--cases", cases.string(), "--json"});
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["rows"].size() == 8);
    }

    TEST_CASE("eval verbs are deterministic in the seed") {
        const auto a = run({"eval", "retrieval", "--seed", "5"});
        const auto b = run({"--seed", "5", "eval", "retrieval"});
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(a.out.find("all_artifacts") != std::string::npos);
        CHECK(run({"eval", "retrieval", "--seed", "6"}).out != a.out);

        TempStore dir("cli-csv");
        const auto csv = dir.path / "r.csv";
        write_file_atomic(csv, "unit_id,rater_id,score\nd1/climate,a,70\nd1/climate,b,75\nd2/climate,a,40\n"
                               "d2/climate,b,45\nd3/conflict,a,90\nd3/conflict,b,80\nd4/conflict,a,20\nd4/conflict,b,30\n");
        const auto x = run({"eval", "agreement", "--ratings", csv.string(), "--iterations", "500", "--seed", "9", "--json"});
        const auto y = run({"eval", "agreement", "--ratings", csv.string(), "--iterations", "500", "--seed", "9", "--json"});
        CHECK(x.code == 0);
        CHECK(x.out == y.out);
        CHECK(json::parse(x.out)["rows"][0]["group"] == "all");
    }

    TEST_CASE("usage and input errors exit with 2") {
        CHECK(run({}).code == 2);
        CHECK(run({"frobnicate"}).code == 2);
        CHECK(run({"search"}).code == 2);
        TempStore dir("cli-err");
        CHECK(run({"--store", dir.path.string(), "generate"}).code == 2);
        CHECK(run({"--store", dir.path.string(), "generate", "nope"}).code == 2);
        CHECK(run({"--store", dir.path.string(), "--config", "/nonexistent.json", "search", "x"}).code == 2);
        CHECK(run({"--help"}).code == 0);
    }
}
