#include "collab/eval/synthetic.hpp"

#include <algorithm>
#include <array>
#include <random>

#include "collab/core/error.hpp"
#include "collab/core/serialize.hpp"
#include "collab/gen/generator.hpp"
#include "collab/gen/mock_provider.hpp"

namespace collab::eval {

namespace {

struct Topic {
    const char* name;
    std::array<const char*, 5> words;
};

const std::array<Topic, 15> kTopics = {{
    {"water", {"filter", "charcoal", "sand", "gravel", "purification"}},
    {"robot", {"robot", "wheels", "motor", "calibration", "sensor"}},
    {"survey", {"survey", "questionnaire", "respondents", "sampling", "wording"}},
    {"bridge", {"bridge", "truss", "popsicle", "load", "span"}},
    {"garden", {"garden", "compost", "seedlings", "soil", "watering"}},
    {"budget", {"budget", "spreadsheet", "expenses", "invoice", "savings"}},
    {"poster", {"poster", "layout", "font", "headline", "colors"}},
    {"rocket", {"rocket", "fins", "nozzle", "altitude", "launch"}},
    {"recycling", {"recycling", "plastic", "bins", "sorting", "landfill"}},
    {"app", {"app", "prototype", "screens", "login", "notifications"}},
    {"solar", {"solar", "panel", "battery", "voltage", "inverter"}},
    {"museum", {"museum", "artifacts", "timeline", "archive", "exhibit"}},
    {"baking", {"recipe", "flour", "oven", "dough", "baking"}},
    {"traffic", {"traffic", "intersection", "pedestrians", "signals", "crosswalk"}},
    {"podcast", {"podcast", "episode", "microphone", "editing", "interview"}},
}};

struct Trait {
    const char* name;
    Dimension dimension;
    std::array<const char*, 4> words;
    const char* query;
};

const std::array<Trait, 10> kTraits = {{
    {"dominance", Dimension::contribution, {"dominated", "monopolized", "interrupted", "sidelined"},
     "which groups had one person who dominated and interrupted others"},
    {"inclusion", Dimension::climate, {"inclusive", "balanced", "equitable", "invited"},
     "groups with inclusive and balanced participation"},
    {"unresolved", Dimension::conflict, {"disagreement", "unresolved", "tension", "friction"},
     "where did disagreement stay unresolved and cause tension"},
    {"consensus", Dimension::compatibility, {"consensus", "converged", "compromise", "alignment"},
     "groups that reached consensus through compromise"},
    {"elaboration", Dimension::constructive, {"elaborated", "extended", "scaffolded", "synthesized"},
     "discussions where members elaborated and synthesized ideas"},
    {"digression", Dimension::context, {"digressions", "tangents", "unfocused", "distracted"},
     "which teams got distracted by tangents"},
    {"support", Dimension::climate, {"encouraging", "praise", "respectful", "warmth"},
     "groups showing encouraging and respectful warmth"},
    {"passivity", Dimension::contribution, {"passive", "silent", "disengaged", "withdrawn"},
     "discussions with passive or disengaged members"},
    {"questioning", Dimension::communication, {"probing", "challenged", "assumptions", "scrutinized"},
     "teams that challenged assumptions with probing questions"},
    {"planning", Dimension::context, {"delegated", "roles", "deadlines", "coordination"},
     "groups that delegated roles and set deadlines"},
}};

// Neutral glue: no topic or trait words, nothing evaluative.
const std::array<const char*, 8> kOpeners = {"I think we could use the", "Maybe we should check the",
                                             "What if we try the",      "Let me write down the",
                                             "Okay so the",             "Next we look at the",
                                             "Yeah and the",            "Right so about the"};

const std::array<const char*, 6> kClosers = {"first", "again later", "for now", "on the sheet", "today",
                                             "next time"};

const std::array<const char*, 6> kNeutralAnalysis = {
    "Typical patterns for this dimension were observed.",
    "Exchanges followed an ordinary rhythm for this dimension.",
    "No notable pattern stood out on this dimension.",
    "Behaviour here matched a usual classroom exchange.",
    "Observed patterns were unremarkable for this dimension.",
    "Moments relevant to this dimension were routine.",
};

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[rng() % v.size()];
}

template <typename T, std::size_t N>
const T& pick(const std::array<T, N>& v, std::mt19937_64& rng) {
    return v[rng() % N];
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    // Fisher-Yates with engine() % n, platform independent unlike std::shuffle.
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::string trait_sentence(const Trait& t, std::mt19937_64& rng) {
    std::vector<std::string> words(t.words.begin(), t.words.end());
    shuffle(words, rng);
    const std::size_t used = 3 + rng() % 2;
    std::string s = "Analysts noted the group " + words[0];
    for (std::size_t i = 1; i < used; ++i) s += (i + 1 == used ? " and " : ", ") + words[i];
    return s + " across the session.";
}

}  // namespace

SyntheticCorpus generate_vocabulary_gap_corpus(std::uint64_t seed, std::size_t count) {
    if (count < 20) throw Error(Errc::invalid_argument, "synthetic corpus needs at least 20 discussions");
    std::mt19937_64 rng(seed);
    SyntheticCorpus corpus;
    corpus.seed = seed;

    std::vector<std::size_t> topic_order(kTopics.size()), trait_order(kTraits.size());
    for (std::size_t i = 0; i < topic_order.size(); ++i) topic_order[i] = i;
    for (std::size_t i = 0; i < trait_order.size(); ++i) trait_order[i] = i;
    shuffle(topic_order, rng);
    shuffle(trait_order, rng);

    const std::vector<std::string> speakers = {"ava", "ben", "cai", "dia", "eli"};
    gen::MockProvider mock("synthetic");
    gen::GenerationOptions gen_options;
    gen_options.clock = fixed_clock(Timestamp{1'767'225'600'000});

    for (std::size_t i = 0; i < count; ++i) {
        const auto& topic = kTopics[topic_order[i % kTopics.size()]];
        const auto& trait = kTraits[trait_order[i % kTraits.size()]];
        char id[32];
        std::snprintf(id, sizeof id, "syn%02zu", i + 1);

        SyntheticDiscussion d;
        d.topic = topic.name;
        d.trait = trait.name;
        d.transcript.discussion_id = id;
        const std::size_t lines = 8 + rng() % 5;
        std::int64_t clock = 0;
        for (std::size_t u = 0; u < lines; ++u) {
            Utterance utt;
            utt.index = u;
            utt.speaker_id = speakers[(u + rng() % 2) % 3 + (i % 3)];
            utt.start_ms = clock;
            utt.end_ms = clock + 2000 + static_cast<std::int64_t>(rng() % 3000);
            clock = utt.end_ms + 300;
            utt.text = std::string(pick(kOpeners, rng)) + " " + pick(topic.words, rng) + " " + pick(topic.words, rng) +
                       " " + pick(kClosers, rng) + ".";
            d.transcript.utterances.push_back(std::move(utt));
        }
        d.concept_map = gen::generate_concept_map(d.transcript, mock, gen_options);

        d.assessment.discussion_id = id;
        d.assessment.provider_tag = "synthetic";
        d.assessment.generated_at = gen_options.clock();
        for (auto dim : kAllDimensions) {
            DimensionAssessment da;
            da.dimension = dim;
            da.score = static_cast<int>(30 + rng() % 61);
            da.analysis = dim == trait.dimension ? trait_sentence(trait, rng) : pick(kNeutralAnalysis, rng);
            const auto& quote = d.transcript.utterances[rng() % d.transcript.utterances.size()];
            da.key_evidence.push_back(quote.text);
            da.anchors.push_back({quote.text, quote.index, 1.0});
            d.assessment.dimensions.push_back(std::move(da));
        }
        corpus.discussions.push_back(std::move(d));
    }

    for (std::size_t q = 0; q < 10; ++q) {
        const auto& topic = kTopics[topic_order[q]];
        RetrievalEvalCase c;
        c.category = QueryCategory::direct;
        std::vector<std::string> words(topic.words.begin(), topic.words.end());
        shuffle(words, rng);
        c.query = words[0] + " " + words[1];
        for (const auto& d : corpus.discussions) {
            if (d.topic == topic.name) c.relevant.push_back(d.transcript.discussion_id);
        }
        corpus.cases.push_back(std::move(c));
    }
    for (const auto& trait : kTraits) {
        RetrievalEvalCase c;
        c.category = QueryCategory::analytical;
        c.query = trait.query;
        for (const auto& d : corpus.discussions) {
            if (d.trait == trait.name) c.relevant.push_back(d.transcript.discussion_id);
        }
        corpus.cases.push_back(std::move(c));
    }
    return corpus;
}

void index_corpus(const SyntheticCorpus& corpus, index::Retriever& retriever) {
    for (const auto& d : corpus.discussions) {
        const auto& id = d.transcript.discussion_id;
        retriever.index_artifact(id, ArtifactKind::transcript, serialize_transcript_text(d.transcript));
        retriever.index_artifact(id, ArtifactKind::concept_map, serialize_concept_map_text(d.concept_map));
        retriever.index_artifact(id, ArtifactKind::assessment, serialize_assessment_text(d.assessment));
    }
}

}  // namespace collab::eval
