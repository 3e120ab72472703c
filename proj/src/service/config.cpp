#include "collab/service/config.hpp"

#include <cstdlib>
#include <set>

#include "collab/agent/demo.hpp"
#include "collab/core/atomic_file.hpp"
#include "collab/core/endpoint.hpp"
#include "collab/core/error.hpp"
#include "collab/gen/http_provider.hpp"
#include "collab/gen/mock_provider.hpp"

namespace collab::service {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::config_error, "config: " + what); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) bad(where + " must be an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
        if (!keys.contains(k)) bad("unknown key \"" + k + "\" in " + where);
    }
}

std::string string_at(const json& obj, const char* key, const std::string& where, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string() || v.get<std::string>().empty()) bad(where + "." + key + " must be a non-empty string");
    return v.get<std::string>();
}

std::int64_t integer_at(const json& obj, const char* key, const std::string& where, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) bad(where + "." + key + " must be an integer");
    return v.get<std::int64_t>();
}

}  // namespace

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v || !*v) return std::nullopt;
        return std::string(v);
    };
}

ServiceConfig parse_config(const json& doc, const std::filesystem::path& base_dir, const EnvLookup& env) {
    only_keys(doc, "config", {"providers", "fusion", "dictionaries", "clock", "server"});
    ServiceConfig cfg;
    if (doc.contains("providers")) {
        const auto& p = doc.at("providers");
        only_keys(p, "providers", {"generation", "embedding"});
        if (p.contains("generation")) {
            const auto& g = p.at("generation");
            only_keys(g, "providers.generation", {"endpoint", "model_tag", "api_key"});
            cfg.generation.endpoint = string_at(g, "endpoint", "providers.generation", cfg.generation.endpoint);
            cfg.generation.model_tag = string_at(g, "model_tag", "providers.generation", cfg.generation.endpoint == "mock" ? "mock" : "");
            if (cfg.generation.model_tag.empty()) bad("providers.generation.model_tag is required for an http endpoint");
            cfg.generation.api_key = string_at(g, "api_key", "providers.generation", "");
        }
        if (p.contains("embedding")) {
            const auto& e = p.at("embedding");
            only_keys(e, "providers.embedding", {"endpoint", "dimension", "api_key"});
            cfg.embedding.endpoint = string_at(e, "endpoint", "providers.embedding", cfg.embedding.endpoint);
            const auto dim = integer_at(e, "dimension", "providers.embedding",
                                        static_cast<std::int64_t>(cfg.embedding.dimension));
            if (dim < 1 || dim > 65536) bad("providers.embedding.dimension must be in 1..65536");
            cfg.embedding.dimension = static_cast<std::size_t>(dim);
            cfg.embedding.api_key = string_at(e, "api_key", "providers.embedding", "");
        }
    }
    for (const auto* endpoint : {&cfg.generation.endpoint, &cfg.embedding.endpoint}) {
        if (*endpoint == "mock" || *endpoint == "hashing") continue;
        try {
            parse_endpoint(*endpoint);
        } catch (const Error& e) {
            bad(e.what());
        }
    }
    if (cfg.generation.endpoint == "hashing") bad("\"hashing\" is not a generation endpoint");
    if (cfg.embedding.endpoint == "mock") bad("\"mock\" is not an embedding endpoint");
    if (doc.contains("fusion")) {
        const auto& f = doc.at("fusion");
        only_keys(f, "fusion", {"rrf_k", "top_n"});
        if (f.contains("rrf_k")) {
            if (!f.at("rrf_k").is_number()) bad("fusion.rrf_k must be a number");
            cfg.fusion.rrf_k = f.at("rrf_k").get<double>();
        }
        const auto top_n = integer_at(f, "top_n", "fusion", static_cast<std::int64_t>(cfg.fusion.top_n));
        if (top_n < 1) bad("fusion.top_n must be >= 1");
        cfg.fusion.top_n = static_cast<std::size_t>(top_n);
        try {
            cfg.fusion.check();
        } catch (const Error& e) {
            bad(e.what());
        }
    }
    if (doc.contains("dictionaries")) {
        std::filesystem::path p = string_at(doc, "dictionaries", "config", "");
        cfg.dictionary_path = p.is_absolute() ? p : base_dir / p;
    }
    if (doc.contains("clock")) {
        const auto& c = doc.at("clock");
        only_keys(c, "clock", {"fixed_ms"});
        if (c.contains("fixed_ms")) cfg.fixed_clock_ms = integer_at(c, "fixed_ms", "clock", 0);
    }
    if (doc.contains("server")) {
        const auto& s = doc.at("server");
        only_keys(s, "server", {"host", "port"});
        cfg.server.host = string_at(s, "host", "server", cfg.server.host);
        const auto port = integer_at(s, "port", "server", cfg.server.port);
        if (port < 0 || port > 65535) bad("server.port must be in 0..65535");
        cfg.server.port = static_cast<int>(port);
    }
    if (auto key = env(gen::kGenerationApiKeyEnv)) cfg.generation.api_key = *key;
    if (auto key = env(index::kEmbeddingApiKeyEnv)) cfg.embedding.api_key = *key;
    return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw Error(Errc::config_error, "config: " + std::string(e.what()));
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path(), env);
}

json to_json(const ServiceConfig& cfg) {
    json j = {
        {"providers",
         {{"generation", {{"endpoint", cfg.generation.endpoint}, {"model_tag", cfg.generation.model_tag}}},
          {"embedding", {{"endpoint", cfg.embedding.endpoint}, {"dimension", cfg.embedding.dimension}}}}},
        {"fusion", {{"rrf_k", cfg.fusion.rrf_k}, {"top_n", cfg.fusion.top_n}}},
        {"server", {{"host", cfg.server.host}, {"port", cfg.server.port}}},
    };
    if (cfg.dictionary_path) j["dictionaries"] = cfg.dictionary_path->string();
    if (cfg.fixed_clock_ms) j["clock"] = {{"fixed_ms", *cfg.fixed_clock_ms}};
    return j;
}

std::unique_ptr<gen::GenerationProvider> make_generation_provider(const GenerationSettings& s) {
    if (s.endpoint == "mock") {
        auto mock = std::make_unique<gen::MockProvider>(s.model_tag);
        agent::install_demo_agent_script(*mock);
        return mock;
    }
    return std::make_unique<gen::HttpGenerationProvider>(
        gen::HttpProviderConfig{s.endpoint, s.model_tag, s.api_key, std::chrono::seconds(120)});
}

std::unique_ptr<index::EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& s) {
    if (s.endpoint == "hashing") return std::make_unique<index::HashingEmbedder>(s.dimension);
    return std::make_unique<index::HttpEmbeddingProvider>(
        index::HttpEmbeddingConfig{s.endpoint, s.dimension, s.api_key, std::chrono::seconds(60)});
}

gen::DictionaryConfig load_configured_dictionary(const ServiceConfig& cfg) {
    if (!cfg.dictionary_path) return {};
    return gen::load_dictionary(cfg.dictionary_path->string());
}

Clock make_clock(const ServiceConfig& cfg) {
    if (cfg.fixed_clock_ms) return fixed_clock(Timestamp{*cfg.fixed_clock_ms});
    return system_clock();
}

}  // namespace collab::service
