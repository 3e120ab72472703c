#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "collab/core/time.hpp"
#include "collab/gen/provider.hpp"
#include "collab/gen/psycholinguistics.hpp"
#include "collab/index/embedding.hpp"
#include "collab/index/retrieval.hpp"

namespace collab::service {

// Endpoint "mock" selects the built-in deterministic generator (with the demo
// agent script); anything else must be an http:// URL.
struct GenerationSettings {
    std::string endpoint = "mock";
    std::string model_tag = "mock";
    std::string api_key;
};

// Endpoint "hashing" selects the feature-hashing embedder.
struct EmbeddingSettings {
    std::string endpoint = "hashing";
    std::size_t dimension = index::HashingEmbedder::kDefaultDimension;
    std::string api_key;
};

struct ServerSettings {
    std::string host = "127.0.0.1";
    int port = 8080;
};

// {
//   "providers": {"generation": {"endpoint", "model_tag"}, "embedding": {"endpoint", "dimension"}},
//   "fusion": {"rrf_k", "top_n"},
//   "dictionaries": "path/to/dictionary.json",
//   "clock": {"fixed_ms": 0},
//   "server": {"host", "port"}
// }
// Every key is optional. Relative dictionary paths resolve against base_dir.
struct ServiceConfig {
    GenerationSettings generation;
    EmbeddingSettings embedding;
    index::FusionConfig fusion;
    std::optional<std::filesystem::path> dictionary_path;
    // Pins every generated_at/indexed_at, for reproducible stores.
    std::optional<std::int64_t> fixed_clock_ms;
    ServerSettings server;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

EnvLookup process_env();

// Credentials come from COLLAB_GENERATION_API_KEY / COLLAB_EMBEDDING_API_KEY
// when set, overriding any "api_key" in the document.
// Throws Error(config_error) on unknown keys, wrong types or bad values.
ServiceConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                           const EnvLookup& env = process_env());
ServiceConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env());

// Credentials are never written back.
nlohmann::json to_json(const ServiceConfig& cfg);

std::unique_ptr<gen::GenerationProvider> make_generation_provider(const GenerationSettings& s);
std::unique_ptr<index::EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& s);
// Empty dictionary when no path is configured.
gen::DictionaryConfig load_configured_dictionary(const ServiceConfig& cfg);
Clock make_clock(const ServiceConfig& cfg);

}  // namespace collab::service
