#pragma once

#include <chrono>
#include <string>

#include "collab/core/endpoint.hpp"
#include "collab/gen/provider.hpp"

namespace collab::gen {

inline constexpr const char* kGenerationApiKeyEnv = "COLLAB_GENERATION_API_KEY";

struct HttpProviderConfig {
    std::string endpoint;  // http://host:port/path
    std::string model_tag;
    std::string api_key;   // sent as a bearer token when non-empty
    std::chrono::seconds timeout{120};
};

// POSTs the canonical JSON of the request and expects a GenerationResponse body.
// Connection errors and 5xx/429 responses raise ProviderError so they are retried;
// other non-2xx statuses and unparseable bodies raise Error(generation_failed).
class HttpGenerationProvider : public GenerationProvider {
public:
    explicit HttpGenerationProvider(HttpProviderConfig config);

    GenerationResponse generate(const GenerationRequest& request) override;
    std::string tag() const override { return config_.model_tag; }

private:
    HttpProviderConfig config_;
    Endpoint endpoint_;
};

}  // namespace collab::gen
