#include "collab/index/embedding.hpp"

#include <httplib.h>

#include <algorithm>
#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

#include "collab/core/error.hpp"
#include "collab/core/text.hpp"

namespace collab::index {

using nlohmann::json;

EmbeddingVector EmbeddingVector::from(std::vector<double> values) {
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(Errc::embed_failed, "embedding has a non-finite entry");
        sum += v * v;
    }
    EmbeddingVector out;
    out.values = std::move(values);
    out.norm = std::sqrt(sum);
    return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.values.size() != b.values.size()) {
        throw Error(Errc::invalid_argument, "cosine of vectors with different dimensions");
    }
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
    return std::clamp(dot / (a.norm * b.norm), -1.0, 1.0);
}

std::size_t estimate_tokens(std::string_view text) { return (text::codepoint_length(text) + 3) / 4; }

EmbeddingVector embed(std::string_view text, EmbeddingProvider& provider, const WindowLimits& limits) {
    if (text::trim(text).empty()) throw Error(Errc::invalid_argument, "cannot embed blank text");
    const auto chars = text::codepoint_length(text);
    if (chars > limits.max_chars || estimate_tokens(text) > limits.max_tokens) {
        throw Error(Errc::text_too_long, "text of " + std::to_string(chars) + " characters (~" +
                                             std::to_string(estimate_tokens(text)) +
                                             " tokens) exceeds the embedding window");
    }
    std::vector<double> raw;
    try {
        raw = provider.embed_raw(text);
    } catch (const Error& e) {
        if (e.code() == Errc::embed_failed) throw;
        throw Error(Errc::embed_failed, std::string("embedding provider failed: ") + e.what());
    } catch (const std::exception& e) {
        throw Error(Errc::embed_failed, std::string("embedding provider failed: ") + e.what());
    }
    if (raw.size() != provider.dimension()) {
        throw Error(Errc::embed_failed, "embedding provider returned " + std::to_string(raw.size()) +
                                            " values, expected " + std::to_string(provider.dimension()));
    }
    return EmbeddingVector::from(std::move(raw));
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw Error(Errc::invalid_argument, "embedding dimension must be positive");
}

bool HashingEmbedder::is_stopword(std::string_view token) {
    static constexpr std::array<std::string_view, 48> kStop = {
        "a",    "about", "an",   "and",   "are",  "as",   "at",   "be",   "but",  "by",   "did",  "do",
        "does", "for",   "from", "had",   "has",  "have", "how",  "i",    "in",   "is",   "it",   "its",
        "of",   "on",    "or",   "so",    "that", "the",  "their", "them", "there", "they", "this", "to",
        "was",  "we",    "were", "what",  "when", "where", "which", "who", "with", "you",  "your", "s"};
    return std::find(kStop.begin(), kStop.end(), token) != kStop.end();
}

std::vector<double> HashingEmbedder::embed_raw(std::string_view text) {
    std::vector<double> v(dimension_, 0.0);
    for (const auto& token : text::tokenize(text)) {
        if (is_stopword(token)) continue;
        const auto h = text::fnv1a64(token);
        v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
    }
    double sum = 0.0;
    for (double x : v) sum += x * x;
    if (sum > 0.0) {
        const double n = std::sqrt(sum);
        for (double& x : v) x /= n;
    }
    return v;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config)
    : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint)) {
    if (config_.dimension == 0) throw Error(Errc::config_error, "embedding dimension must be configured");
}

std::vector<double> HttpEmbeddingProvider::embed_raw(std::string_view text) {
    httplib::Client client(endpoint_.host, endpoint_.port);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    const json body{{"text", std::string(text)}};
    auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
    if (!res) throw Error(Errc::embed_failed, "embedding endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw Error(Errc::embed_failed, "embedding endpoint returned HTTP " + std::to_string(res->status));
    }
    const auto doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("vector") || !doc["vector"].is_array()) {
        throw Error(Errc::embed_failed, "embedding endpoint returned no vector");
    }
    std::vector<double> out;
    for (const auto& v : doc["vector"]) {
        if (!v.is_number()) throw Error(Errc::embed_failed, "embedding vector has a non-numeric entry");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace collab::index
