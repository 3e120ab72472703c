#pragma once

#include <memory>
#include <string>

#include "collab/core/error.hpp"
#include "collab/service/service.hpp"

namespace collab::service {

// Status used for an Error code on the HTTP surface.
int http_status(Errc code);

// JSON API over a Service. Every response body is canonical JSON; failures
// carry {"error": {"code", "message"}}.
//
//   POST /sessions                                   {session_id, title?, started_at?, metadata?}
//   POST /sessions/{s}/discussions/{d}/transcript    JSONL body, ?group_label=
//   POST /discussions/{d}/artifacts
//   GET  /discussions/{d}/transcript|concept-map|assessment|metrics
//   GET  /search?q=&kinds=transcript,assessment&n=10
//   POST /chat                                       {query, allowed_kinds?, baseline_mode?, max_iterations?}
//   GET  /speakers/{id}/profile
//   GET  /health
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws Error(io_error).
    int bind(const std::string& host, int port);
    // Serves until stop(). Call bind() first.
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace collab::service
