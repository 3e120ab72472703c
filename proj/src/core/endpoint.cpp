#include "collab/core/endpoint.hpp"

#include <charconv>

#include "collab/core/error.hpp"

namespace collab {

Endpoint parse_endpoint(std::string_view url) {
    constexpr std::string_view scheme = "http://";
    if (!url.starts_with(scheme)) {
        throw Error(Errc::config_error, "endpoint must start with http:// (got \"" + std::string(url) + "\")");
    }
    url.remove_prefix(scheme.size());
    Endpoint ep;
    const auto slash = url.find('/');
    auto authority = url.substr(0, slash);
    if (slash != std::string_view::npos) ep.path = std::string(url.substr(slash));
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        const auto port = authority.substr(colon + 1);
        const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), ep.port);
        if (ec != std::errc{} || ptr != port.data() + port.size() || ep.port <= 0 || ep.port > 65535) {
            throw Error(Errc::config_error, "bad port in endpoint: " + std::string(port));
        }
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) throw Error(Errc::config_error, "endpoint has no host");
    ep.host = std::string(authority);
    return ep;
}

}  // namespace collab
