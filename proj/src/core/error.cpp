#include "collab/core/error.hpp"

namespace collab {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::invalid_artifact: return "invalid-artifact";
        case Errc::generation_failed: return "generation-failed";
        case Errc::provider_failure: return "provider-failure";
        case Errc::scripting_error: return "scripting-error";
        case Errc::text_too_long: return "text-too-long";
        case Errc::embed_failed: return "embed-failed";
        case Errc::not_found: return "not-found";
        case Errc::undefined_statistic: return "undefined-statistic";
        case Errc::parse_error: return "parse-error";
        case Errc::agent_failed: return "agent-failed";
        case Errc::io_error: return "io-error";
        case Errc::config_error: return "config-error";
    }
    return "unknown";
}

}  // namespace collab
