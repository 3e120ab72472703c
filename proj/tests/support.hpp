#pragma once

// Shared fixtures and random generators for the test suites.

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "collab/core/types.hpp"

namespace collab::testing {

inline Transcript make_transcript(std::string discussion_id,
                                  const std::vector<std::pair<std::string, std::string>>& lines) {
    Transcript t;
    t.discussion_id = std::move(discussion_id);
    std::int64_t clock = 0;
    for (const auto& [speaker, said] : lines) {
        Utterance u;
        u.index = t.utterances.size();
        u.speaker_id = speaker;
        u.start_ms = clock;
        u.end_ms = clock + 1500;
        u.text = said;
        clock += 2000;
        t.utterances.push_back(std::move(u));
    }
    return t;
}

inline SevenCAssessment make_assessment(std::string discussion_id, const std::vector<int>& scores) {
    SevenCAssessment a;
    a.discussion_id = std::move(discussion_id);
    a.provider_tag = "fixture";
    for (std::size_t i = 0; i < scores.size() && i < kAllDimensions.size(); ++i) {
        DimensionAssessment d;
        d.dimension = kAllDimensions[i];
        d.score = scores[i];
        d.analysis = "Observed behaviour for " + std::string(display_name(d.dimension)) + ".";
        a.dimensions.push_back(std::move(d));
    }
    return a;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
    }
    bool coin(double p = 0.5) { return uniform(0, 1) < p; }

    std::string word() {
        static const std::vector<std::string> words = {
            "budget", "plan", "robot", "we", "should", "try", "maybe", "think", "water", "idea",
            "because", "sensor", "ok", "what", "if", "build", "test", "again", "café", "naïve"};
        return words[index(words.size())];
    }

    std::string sentence(int min_words = 1, int max_words = 8) {
        const int n = integer(min_words, max_words);
        std::string s;
        for (int i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += word();
        }
        return s;
    }

    Transcript transcript(const std::string& id, int min_utt = 1, int max_utt = 12) {
        Transcript t;
        t.discussion_id = id;
        const int n = integer(min_utt, max_utt);
        std::int64_t clock = integer(0, 5000);
        for (int i = 0; i < n; ++i) {
            Utterance u;
            u.index = static_cast<std::size_t>(i);
            u.speaker_id = "s" + std::to_string(integer(1, 4));
            u.start_ms = clock;
            u.end_ms = clock + integer(0, 4000);
            clock = u.end_ms + integer(0, 800);
            u.text = sentence() + (coin() ? "." : "?");
            t.utterances.push_back(std::move(u));
        }
        return t;
    }

    ConceptMap concept_map(const Transcript& t) {
        ConceptMap m;
        m.discussion_id = t.discussion_id;
        m.provider_tag = "gen";
        m.generated_at = Timestamp{static_cast<std::int64_t>(integer(0, 1 << 30)) * 1000 + integer(0, 999)};
        const int nodes = integer(0, 8);
        for (int i = 0; i < nodes; ++i) {
            ConceptNode n;
            n.node_id = "n" + std::to_string(i);
            n.label = sentence(1, 5);
            n.node_type = kAllNodeTypes[index(kAllNodeTypes.size())];
            n.description = coin() ? sentence() : "";
            for (int k = integer(0, 2); k > 0; --k) n.source_utterance_indices.push_back(index(t.utterances.size()));
            for (int k = integer(0, 2); k > 0; --k) n.speaker_ids.push_back("s" + std::to_string(integer(1, 4)));
            m.nodes.push_back(std::move(n));
        }
        if (nodes >= 2) {
            const int edges = integer(0, nodes * 2);
            for (int i = 0; i < edges; ++i) {
                ConceptEdge e;
                e.edge_id = "e" + std::to_string(i);
                const auto a = index(static_cast<std::size_t>(nodes));
                auto b = index(static_cast<std::size_t>(nodes - 1));
                if (b >= a) ++b;
                e.source = m.nodes[a].node_id;
                e.target = m.nodes[b].node_id;
                e.edge_type = kAllEdgeTypes[index(kAllEdgeTypes.size())];
                e.rationale = coin() ? sentence() : "";
                m.edges.push_back(std::move(e));
            }
        }
        return m;
    }

    SevenCAssessment assessment(const std::string& id) {
        SevenCAssessment a;
        a.discussion_id = id;
        a.provider_tag = "gen";
        a.generated_at = Timestamp{static_cast<std::int64_t>(integer(0, 1 << 30)) * 1000};
        for (auto dim : kAllDimensions) {
            DimensionAssessment d;
            d.dimension = dim;
            d.score = integer(0, 100);
            d.analysis = sentence(3, 12);
            for (int k = integer(0, 3); k > 0; --k) d.key_evidence.push_back(sentence());
            a.dimensions.push_back(std::move(d));
        }
        return a;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace collab::testing
