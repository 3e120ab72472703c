#include "collab/service/cli.hpp"

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "collab/core/atomic_file.hpp"
#include "collab/core/error.hpp"
#include "collab/core/json_io.hpp"
#include "collab/eval/agreement.hpp"
#include "collab/eval/retrieval_eval.hpp"
#include "collab/eval/synthetic.hpp"
#include "collab/service/http.hpp"
#include "collab/service/service.hpp"

namespace collab::service {

namespace {

KindSet parse_kinds(const std::string& list) {
    KindSet kinds = KindSet::none();
    std::size_t pos = 0;
    while (pos <= list.size()) {
        auto end = list.find(',', pos);
        if (end == std::string::npos) end = list.size();
        const auto name = list.substr(pos, end - pos);
        const auto kind = parse_artifact_kind(name);
        if (!kind) throw Error(Errc::invalid_argument, "unknown artifact kind \"" + name + "\"");
        kinds.insert(*kind);
        pos = end + 1;
    }
    return kinds;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Collaboration analytics: artifact store, retrieval, agent chat and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string store_root = "collab-store";
    std::string config_path;
    std::uint64_t seed = 0;
    bool as_json = false;
    app.add_option("--store", store_root, "Store root directory")->capture_default_str();
    app.add_option("--config", config_path, "Config JSON (default: <store>/config.json when present)");
    app.add_option("--seed", seed, "Seed for randomized steps")->capture_default_str();
    app.add_flag("--json", as_json, "Print canonical JSON instead of text");

    auto* ingest = app.add_subcommand("ingest", "Ingest a JSONL transcript or a corpus manifest");
    std::string session_id, discussion_id, group_label, title, manifest, transcript_file;
    ingest->add_option("--session", session_id, "Session id (created when missing)");
    ingest->add_option("--discussion", discussion_id, "Discussion id");
    ingest->add_option("--group-label", group_label, "Group label");
    ingest->add_option("--title", title, "Title for a newly created session");
    ingest->add_option("--manifest", manifest, "Corpus manifest JSON")->check(CLI::ExistingFile);
    ingest->add_option("file", transcript_file, "Transcript JSONL")->check(CLI::ExistingFile);

    auto* generate = app.add_subcommand("generate", "Generate concept maps, assessments and metrics");
    std::vector<std::string> generate_ids;
    bool generate_all = false;
    generate->add_option("discussions", generate_ids, "Discussion ids");
    generate->add_flag("--all", generate_all, "Every discussion in the store");

    auto* index_cmd = app.add_subcommand("index", "Index maintenance");
    index_cmd->require_subcommand(1);
    index_cmd->fallthrough();
    auto* rebuild = index_cmd->add_subcommand("rebuild", "Re-embed every stored artifact");

    auto* search = app.add_subcommand("search", "Fused search across artifact collections");
    std::string query, kinds_text;
    std::size_t top_n = 0;
    search->add_option("query", query, "Query text")->required();
    search->add_option("--kinds", kinds_text, "Comma-separated artifact kinds");
    search->add_option("-n,--top-n", top_n, "Number of results");

    auto* chat = app.add_subcommand("chat", "Ask the agent a question");
    bool baseline = false;
    int max_iterations = 8;
    std::string trace_out;
    chat->add_option("query", query, "Question")->required();
    chat->add_option("--kinds", kinds_text, "Comma-separated artifact kinds the agent may consult");
    chat->add_flag("--baseline", baseline, "Transcript-only baseline agent");
    chat->add_option("--max-iterations", max_iterations, "Iteration cap (1-8)")->capture_default_str();
    chat->add_option("--trace-out", trace_out, "Write the full trace JSON to this file");

    auto* eval = app.add_subcommand("eval", "Evaluation harnesses");
    eval->require_subcommand(1);
    eval->fallthrough();
    auto* eval_retrieval = eval->add_subcommand("retrieval", "Recall@5/@10 and MRR@5 per artifact condition");
    std::string cases_path;
    std::size_t synthetic_n = 30;
    eval_retrieval->add_option("--cases", cases_path, "Eval cases JSON, run against the store index")
        ->check(CLI::ExistingFile);
    eval_retrieval->add_option("--synthetic-discussions", synthetic_n,
                               "Without --cases: size of the generated vocabulary-gap corpus")
        ->capture_default_str();
    auto* eval_agreement = eval->add_subcommand("agreement", "Alpha with bootstrap CI, Spearman and MAD");
    std::string ratings_path;
    std::size_t iterations = 10000;
    eval_agreement->add_option("--ratings", ratings_path, "CSV with unit_id,rater_id,score")
        ->required()
        ->check(CLI::ExistingFile);
    eval_agreement->add_option("--iterations", iterations, "Bootstrap iterations")->capture_default_str();

    auto* doctor = app.add_subcommand("doctor", "Check store and index coherence");
    bool repair = false;
    doctor->add_flag("--repair", repair, "Remove leftovers and orphans, then rebuild the index");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string host;
    int port = -1;
    serve->add_option("--host", host, "Bind address (default from config)");
    serve->add_option("--port", port, "Port (default from config; 0 picks a free one)");

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    auto print = [&](const json& j, const std::string& text) { out << (as_json ? canonical_dump(j) + "\n" : text); };
    const std::optional<std::filesystem::path> cfg_path =
        config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_path);

    try {
        if (eval_agreement->parsed()) {
            const auto report = eval::run_agreement_eval(eval::load_ratings_csv(ratings_path), iterations, seed);
            print(eval::to_json(report), eval::to_text(report));
            return 0;
        }
        if (eval_retrieval->parsed() && cases_path.empty()) {
            const auto corpus = eval::generate_vocabulary_gap_corpus(seed, synthetic_n);
            index::HashingEmbedder embedder;
            index::ArtifactIndex idx(embedder.dimension());
            index::Retriever retriever(idx, embedder, fixed_clock(Timestamp{0}));
            eval::index_corpus(corpus, retriever);
            const auto report = eval::run_retrieval_eval(corpus.cases, eval::standard_conditions(), retriever, seed);
            print(eval::to_json(report), eval::to_text(report));
            return 0;
        }
        if (doctor->parsed()) {
            ServiceConfig cfg = cfg_path ? load_config(*cfg_path)
                                : std::filesystem::exists(std::filesystem::path(store_root) / "config.json")
                                    ? load_config(std::filesystem::path(store_root) / "config.json")
                                    : parse_config(json::object(), store_root);
            auto embedder = make_embedding_provider(cfg.embedding);
            const auto report = run_doctor(store_root, *embedder, repair, make_clock(cfg));
            print(to_json(report), to_text(report));
            return report.ok() ? 0 : 1;
        }

        auto rt = open_runtime(store_root, cfg_path);
        auto& svc = *rt->service;

        if (ingest->parsed()) {
            std::vector<IngestResult> results;
            if (!manifest.empty()) {
                if (!transcript_file.empty()) throw Error(Errc::invalid_argument, "give either --manifest or a file");
                results = ingest_manifest(svc, manifest);
            } else {
                if (transcript_file.empty() || session_id.empty() || discussion_id.empty()) {
                    throw Error(Errc::invalid_argument, "ingest needs --session, --discussion and a transcript file");
                }
                if (!svc.store().session(session_id)) {
                    Session s;
                    s.session_id = session_id;
                    s.title = title.empty() ? session_id : title;
                    svc.put_session(s);
                }
                std::optional<std::string> label;
                if (!group_label.empty()) label = group_label;
                results.push_back(svc.ingest_transcript(session_id, discussion_id, read_file(transcript_file), label));
            }
            json j = json::array();
            std::string text;
            for (const auto& r : results) {
                j.push_back(to_json(r));
                for (const auto& w : r.warnings) err << "warning: " << r.discussion.discussion_id << ": " << w << "\n";
                text += (r.replaced ? "replaced " : "ingested ") + r.discussion.discussion_id + " (" +
                        std::to_string(r.utterances) + " utterances, session " + r.discussion.session_id + ")\n";
                for (const auto& inv : r.invalidated) text += "  dropped stale " + inv + "\n";
            }
            print(j, text);
            return 0;
        }

        if (generate->parsed()) {
            if (generate_all) {
                for (const auto& d : svc.store().all_discussions()) generate_ids.push_back(d.discussion_id);
            }
            if (generate_ids.empty()) throw Error(Errc::invalid_argument, "name discussions or pass --all");
            json j = json::array();
            std::string text;
            bool ok = true;
            for (const auto& id : generate_ids) {
                const auto r = svc.generate_artifacts(id);
                ok = ok && r.ok();
                j.push_back({{"discussion_id", id}, {"ok", r.ok()}, {"failures", r.failures}});
                text += id + ": " + (r.ok() ? "concept_map, assessment, metrics written" : "FAILED") + "\n";
                for (const auto& f : r.failures) text += "  " + f + "\n";
            }
            print(j, text);
            return ok ? 0 : 1;
        }

        if (rebuild->parsed()) {
            const auto n = svc.rebuild_index();
            print({{"indexed_documents", n}}, "indexed " + std::to_string(n) + " documents\n");
            return 0;
        }

        if (search->parsed()) {
            auto cfg = svc.fusion();
            if (!kinds_text.empty()) cfg.allowed_kinds = parse_kinds(kinds_text);
            if (top_n > 0) cfg.top_n = top_n;
            const auto hits = svc.search(query, cfg);
            std::string text;
            for (std::size_t i = 0; i < hits.size(); ++i) {
                text += std::to_string(i + 1) + ". " + hits[i].discussion_id + "  " + fmt(hits[i].score) + "  [";
                for (std::size_t k = 0; k < hits[i].contributions.size(); ++k) {
                    const auto& c = hits[i].contributions[k];
                    text += (k ? ", " : "") + std::string(to_string(c.kind)) + " #" + std::to_string(c.rank);
                }
                text += "]\n";
            }
            if (hits.empty()) text = "no results\n";
            print(search_json(query, cfg, hits), text);
            return 0;
        }

        if (chat->parsed()) {
            ChatRequest req;
            req.query = query;
            req.baseline_mode = baseline;
            req.max_iterations = max_iterations;
            if (!kinds_text.empty()) req.allowed_kinds = parse_kinds(kinds_text);
            const auto r = svc.chat(req);
            if (!trace_out.empty()) write_file_atomic(trace_out, pretty_dump(agent::to_json(r.trace)));
            std::string text = r.answer + "\n";
            if (!r.citations.empty()) {
                text += "\nCitations:\n";
                for (const auto& c : r.citations) {
                    text += "  " + c.discussion_id + " (" + std::string(to_string(c.kind)) + ")\n";
                }
            }
            text += "\n" + std::to_string(r.trace.iterations.size()) + " iterations" +
                    (r.trace.evidence_limited ? ", evidence limited by the iteration cap" : "") + "\n";
            print(to_json(r), text);
            return 0;
        }

        if (eval_retrieval->parsed()) {
            auto conditions = eval::standard_conditions();
            for (auto& c : conditions) c.fusion.rrf_k = svc.fusion().rrf_k;
            const auto report = eval::run_retrieval_eval(eval::load_eval_cases(cases_path), conditions,
                                                         svc.retriever(), seed);
            for (const auto& w : report.warnings) err << "warning: " << w << "\n";
            print(eval::to_json(report), eval::to_text(report));
            return 0;
        }

        if (serve->parsed()) {
            HttpServer server(svc);
            const int bound = server.bind(host.empty() ? rt->config.server.host : host,
                                          port < 0 ? rt->config.server.port : port);
            err << "listening on " << (host.empty() ? rt->config.server.host : host) << ":" << bound << "\n";
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.listen();
            g_server = nullptr;
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace collab::service
