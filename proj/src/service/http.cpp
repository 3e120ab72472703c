#include "collab/service/http.hpp"

#include <httplib.h>

#include "collab/core/json_io.hpp"

namespace collab::service {

namespace {

constexpr std::size_t kMaxBodyBytes = 16 * 1024 * 1024;

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(canonical_dump(body), "application/json");
}

json error_body(std::string_view code, const std::string& message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

void fail(httplib::Response& res, const Error& e) { reply(res, http_status(e.code()), error_body(to_string(e.code()), e.what())); }

// Runs a handler and maps library errors onto statuses.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const agent::AgentFailed& e) {
            auto body = error_body(to_string(e.code()), e.what());
            body["trace"] = agent::to_json(e.trace());
            reply(res, http_status(e.code()), body);
        } catch (const Error& e) {
            fail(res, e);
        } catch (const json::exception& e) {
            reply(res, 400, error_body("parse_error", e.what()));
        } catch (const std::exception& e) {
            reply(res, 500, error_body("internal", e.what()));
        }
    };
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse_error, std::string("request body is not JSON: ") + e.what());
    }
}

Session parse_session(const json& body) {
    if (!body.is_object()) throw Error(Errc::invalid_argument, "session must be a JSON object");
    for (const auto& [k, v] : body.items()) {
        if (k != "session_id" && k != "title" && k != "started_at" && k != "metadata") {
            throw Error(Errc::invalid_argument, "session: unknown field \"" + k + "\"");
        }
    }
    Session s;
    if (!body.contains("session_id") || !body.at("session_id").is_string()) {
        throw Error(Errc::invalid_argument, "session: \"session_id\" must be a string");
    }
    s.session_id = body.at("session_id").get<std::string>();
    s.title = body.contains("title") ? body.at("title").get<std::string>() : s.session_id;
    if (body.contains("started_at")) {
        try {
            s.started_at = parse_iso8601(body.at("started_at").get<std::string>());
        } catch (const std::exception& e) {
            throw Error(Errc::invalid_argument, std::string("session: bad \"started_at\": ") + e.what());
        }
    }
    if (body.contains("metadata")) s.metadata = body.at("metadata").get<std::map<std::string, std::string>>();
    return s;
}

index::FusionConfig search_config(const httplib::Request& req, index::FusionConfig cfg) {
    if (req.has_param("kinds")) {
        KindSet kinds = KindSet::none();
        const auto list = req.get_param_value("kinds");
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
        cfg.allowed_kinds = kinds;
    }
    if (req.has_param("n")) {
        const auto text = req.get_param_value("n");
        std::size_t used = 0;
        long n = 0;
        try {
            n = std::stol(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size() || n < 1 || n > 100) throw Error(Errc::invalid_argument, "n must be an integer in 1..100");
        cfg.top_n = static_cast<std::size_t>(n);
    }
    cfg.check();
    return cfg;
}

}  // namespace

int http_status(Errc code) {
    switch (code) {
        case Errc::invalid_argument:
        case Errc::parse_error:
        case Errc::text_too_long:
            return 400;
        case Errc::not_found:
            return 404;
        case Errc::invalid_artifact:
        case Errc::generation_failed:
        case Errc::provider_failure:
        case Errc::embed_failed:
        case Errc::agent_failed:
            return 502;
        case Errc::undefined_statistic:
            return 422;
        default:
            return 500;
    }
}

struct HttpServer::Impl {
    explicit Impl(Service& s) : service(s) {}
    Service& service;
    httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    auto& svc = impl_->service;
    auto& srv = impl_->server;
    srv.set_payload_max_length(kMaxBodyBytes);
    // SO_REUSEADDR only: a second server on a busy port must fail to bind.
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto message = res.status == 404 ? "no route for " + req.method + " " + req.path : std::string("request failed");
        res.set_content(canonical_dump(error_body(res.status == 404 ? "not_found" : "http_error", message)),
                        "application/json");
    });

    srv.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, {{"status", "ok"}});
    }));

    srv.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto s = parse_session(parse_body(req));
        const bool created = svc.put_session(s);
        reply(res, created ? 201 : 200, json(*svc.store().session(s.session_id)));
    }));

    srv.Post(R"(/sessions/([^/]+)/discussions/([^/]+)/transcript)",
             guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 std::optional<std::string> label;
                 if (req.has_param("group_label")) label = req.get_param_value("group_label");
                 const auto r = svc.ingest_transcript(req.matches[1], req.matches[2], req.body, label);
                 reply(res, r.replaced ? 200 : 201, to_json(r));
             }));

    srv.Post(R"(/discussions/([^/]+)/artifacts)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto r = svc.generate_artifacts(req.matches[1]);
        auto body = to_json(r);
        if (!r.ok()) body["error"] = {{"code", "generation_failed"}, {"message", "some artifacts were not generated"}};
        reply(res, r.ok() ? 200 : 502, body);
    }));

    srv.Get(R"(/discussions/([^/]+)/(transcript|concept-map|assessment|metrics))",
            guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                const std::string did = req.matches[1];
                const std::string what = req.matches[2];
                const StoredFile f = what == "transcript"    ? StoredFile::transcript
                                     : what == "concept-map" ? StoredFile::concept_map
                                     : what == "assessment"  ? StoredFile::assessment
                                                             : StoredFile::metrics;
                if (!svc.store().discussion(did)) throw Error(Errc::not_found, "unknown discussion " + did);
                auto body = svc.artifact_json(did, f);
                if (!body) throw Error(Errc::not_found, "discussion " + did + " has no " + what);
                reply(res, 200, *body);
            }));

    srv.Get("/search", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto q = req.get_param_value("q");
        if (q.empty()) throw Error(Errc::invalid_argument, "query parameter q is required");
        const auto cfg = search_config(req, svc.fusion());
        reply(res, 200, search_json(q, cfg, svc.search(q, cfg)));
    }));

    srv.Post("/chat", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, to_json(svc.chat(parse_chat_request(parse_body(req)))));
    }));

    srv.Get(R"(/speakers/([^/]+)/profile)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, agent::to_json(svc.speaker_profile(req.matches[1])));
    }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& srv = impl_->server;
    if (port == 0) {
        const int bound = srv.bind_to_any_port(host);
        if (bound <= 0) throw Error(Errc::io_error, "cannot bind " + host);
        return bound;
    }
    if (!srv.bind_to_port(host, port)) throw Error(Errc::io_error, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace collab::service
