#pragma once

#include <string>
#include <string_view>

namespace collab {

// Plain-HTTP service location parsed from "http://host[:port][/path]".
struct Endpoint {
    std::string host;
    int port = 80;
    std::string path = "/";
};

// Throws Error(config_error) for anything other than an http:// URL with a host.
Endpoint parse_endpoint(std::string_view url);

}  // namespace collab
