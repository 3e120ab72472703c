#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace collab {

enum class Errc {
    invalid_argument,
    invalid_artifact,
    generation_failed,
    provider_failure,
    scripting_error,
    text_too_long,
    embed_failed,
    not_found,
    undefined_statistic,
    parse_error,
    agent_failed,
    io_error,
    config_error,
};

std::string_view to_string(Errc code);

// Base exception for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace collab
