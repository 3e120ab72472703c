#include "collab/gen/http_provider.hpp"

#include <httplib.h>

#include "collab/core/json_io.hpp"

namespace collab::gen {

HttpGenerationProvider::HttpGenerationProvider(HttpProviderConfig config)
    : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint)) {
    if (config_.model_tag.empty()) config_.model_tag = "http:" + endpoint_.host;
}

GenerationResponse HttpGenerationProvider::generate(const GenerationRequest& request) {
    // httplib clients are not shareable across threads; one per call keeps generate() reentrant.
    httplib::Client client(endpoint_.host, endpoint_.port);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    headers.emplace("X-Model-Tag", config_.model_tag);

    const json body = request;
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(endpoint_.path, headers, canonical_dump(body), "application/json");
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    if (!res) throw ProviderError("generation endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status >= 500 || res->status == 429) {
        throw ProviderError("generation endpoint returned HTTP " + std::to_string(res->status));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(Errc::generation_failed, "generation endpoint returned HTTP " + std::to_string(res->status) +
                                                 ": " + res->body.substr(0, 200));
    }
    const auto doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(Errc::generation_failed, "generation endpoint returned a non-JSON body");
    }
    GenerationResponse response = doc.get<GenerationResponse>();
    if (response.provider_tag.empty()) response.provider_tag = config_.model_tag;
    if (response.latency_ms == 0) response.latency_ms = elapsed.count();
    return response;
}

}  // namespace collab::gen
