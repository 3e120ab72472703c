#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "collab/core/endpoint.hpp"
#include "collab/core/error.hpp"

namespace collab::index {

struct EmbeddingVector {
    std::vector<double> values;
    double norm = 0.0;

    // Computes the cached norm. Throws Error(embed_failed) on non-finite entries.
    static EmbeddingVector from(std::vector<double> values);

    std::size_t dimension() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

// Cosine similarity; 0 when either vector is all zeros. Dimensions must match.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Implementations must tolerate concurrent embed_raw() calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::vector<double> embed_raw(std::string_view text) = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string tag() const = 0;
};

struct WindowLimits {
    std::size_t max_tokens = 8192;
    std::size_t max_chars = 32768;
};

// Characters / 4, rounded up.
std::size_t estimate_tokens(std::string_view text);

// Errors: blank text -> invalid_argument; over the window -> text_too_long;
// provider failure or a malformed vector -> embed_failed. No chunking.
EmbeddingVector embed(std::string_view text, EmbeddingProvider& provider, const WindowLimits& limits = {});

// Signed feature hashing: each non-stopword token adds +-1 to bucket
// fnv1a64(token) mod D, with the sign taken from bit 63; then L2-normalized.
class HashingEmbedder : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDimension = 256;

    explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);

    std::vector<double> embed_raw(std::string_view text) override;
    std::size_t dimension() const override { return dimension_; }
    std::string tag() const override { return "hashing-" + std::to_string(dimension_); }

    static bool is_stopword(std::string_view token);

private:
    std::size_t dimension_;
};

inline constexpr const char* kEmbeddingApiKeyEnv = "COLLAB_EMBEDDING_API_KEY";

struct HttpEmbeddingConfig {
    std::string endpoint;
    std::size_t dimension = 0;
    std::string api_key;
    std::chrono::seconds timeout{60};
};

// POST {"text": ...} -> {"vector": [...]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config);

    std::vector<double> embed_raw(std::string_view text) override;
    std::size_t dimension() const override { return config_.dimension; }
    std::string tag() const override { return "http:" + endpoint_.host; }

private:
    HttpEmbeddingConfig config_;
    Endpoint endpoint_;
};

}  // namespace collab::index
