#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>

#include "collab/core/anchor.hpp"
#include "collab/core/error.hpp"
#include "collab/core/json_io.hpp"
#include "collab/core/serialize.hpp"
#include "collab/core/text.hpp"
#include "collab/core/validation.hpp"
#include "support.hpp"

using namespace collab;
using collab::testing::Gen;
using collab::testing::make_assessment;
using collab::testing::make_transcript;

namespace {

bool has_code(const std::vector<ValidationError>& errors, ValidationCode code) {
    return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.code == code; });
}

// Plain recursive edit distance with memoization; shares nothing with the library routine.
std::size_t edit_distance_oracle(const std::u32string& a, const std::u32string& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size()) return b.size() - j;
        if (j == b.size()) return a.size() - i;
        auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::size_t best;
        if (a[i] == b[j]) {
            best = go(i + 1, j + 1);
        } else {
            best = 1 + std::min({go(i + 1, j), go(i, j + 1), go(i + 1, j + 1)});
        }
        memo[key] = best;
        return best;
    };
    return go(0, 0);
}

ConceptMap two_node_map() {
    ConceptMap m;
    m.discussion_id = "d1";
    m.nodes.push_back({"n1", "A", NodeType::idea, "first thought", {0}, {"s1"}});
    m.nodes.push_back({"n2", "B", NodeType::solution, "", {1}, {"s2"}});
    m.edges.push_back({"e1", "n2", "n1", EdgeType::builds_on, "extends"});
    return m;
}

void check_golden(const std::string& name, const std::string& actual) {
    const std::string path = std::string(COLLAB_GOLDEN_DIR) + "/" + name;
    if (std::getenv("COLLAB_UPDATE_GOLDEN")) {
        std::ofstream(path, std::ios::binary) << actual;
    }
    CHECK(collab::testing::read_file(path) == actual);
}

}  // namespace

TEST_SUITE("core.validation") {
    TEST_CASE("conforming concept map has no errors") {
        auto t = make_transcript("d1", {{"s1", "We could use solar."}, {"s2", "Add a battery too."}});
        CHECK(validate_concept_map(two_node_map(), t).empty());
    }

    TEST_CASE("unknown node type is rejected at the decoding boundary") {
        auto t = make_transcript("d1", {{"s1", "hello"}});
        json doc = two_node_map();
        doc["nodes"][0]["node_type"] = "opinion";
        auto errors = check_concept_map_json(doc, t);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].code == ValidationCode::unknown_node_type);
    }

    TEST_CASE("edge referencing a missing node is dangling") {
        auto m = two_node_map();
        m.edges.push_back({"e2", "n1", "ghost", EdgeType::supports, ""});
        auto errors = validate_concept_map(m);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].code == ValidationCode::dangling_edge);
    }

    TEST_CASE("other structural violations") {
        auto t = make_transcript("d1", {{"s1", "hello"}});
        auto m = two_node_map();
        m.nodes.push_back(m.nodes[0]);
        m.edges.push_back({"e1", "n1", "n1", EdgeType::supports, ""});
        m.nodes[1].label = std::string(121, 'x');
        m.nodes[1].source_utterance_indices = {7};
        auto errors = validate_concept_map(m, t);
        CHECK(has_code(errors, ValidationCode::duplicate_node_id));
        CHECK(has_code(errors, ValidationCode::duplicate_edge_id));
        CHECK(has_code(errors, ValidationCode::self_loop));
        CHECK(has_code(errors, ValidationCode::label_too_long));
        CHECK(has_code(errors, ValidationCode::invalid_utterance_index));
    }

    TEST_CASE("decoding truncates over-long labels instead of failing") {
        json doc = two_node_map();
        doc["nodes"][0]["label"] = std::string(200, 'y');
        std::vector<ValidationError> errors;
        auto m = decode_concept_map(doc, errors);
        REQUIRE(m);
        CHECK(text::codepoint_length(m->nodes[0].label) == kMaxLabelLength);
        CHECK(m->nodes[0].label.ends_with("…"));
    }

    TEST_CASE("assessment with in-range scores is valid") {
        CHECK(validate_assessment(make_assessment("d1", {78, 78, 69, 53, 63, 67, 69})).empty());
    }

    TEST_CASE("assessment missing Conflict") {
        auto a = make_assessment("d1", {78, 78, 69, 53, 63, 67, 69});
        a.dimensions.erase(a.dimensions.begin() + 3);
        auto errors = validate_assessment(a);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].code == ValidationCode::missing_dimension);
        CHECK(describe(errors[0]) == "missing-dimension: Conflict");
    }

    TEST_CASE("score 101 is out of range") {
        auto a = make_assessment("d1", {78, 78, 69, 53, 63, 67, 101});
        auto errors = validate_assessment(a);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].code == ValidationCode::score_out_of_range);
    }

    TEST_CASE("fractional provider scores round half up") {
        json doc = make_assessment("d1", {1, 2, 3, 4, 5, 6, 7});
        doc["dimensions"][0]["score"] = 77.5;
        doc["dimensions"][1]["score"] = 77.49;
        std::vector<ValidationError> errors;
        auto a = decode_assessment(doc, errors);
        REQUIRE(a);
        CHECK(a->dimensions[0].score == 78);
        CHECK(a->dimensions[1].score == 77);
    }

    TEST_CASE("transcript checks") {
        auto t = make_transcript("d1", {{"s1", "a"}, {"s2", "b"}});
        CHECK(validate_transcript(t).errors.empty());
        t.utterances[1].index = 5;
        t.utterances[0].end_ms = -1;
        auto check = validate_transcript(t);
        CHECK(has_code(check.errors, ValidationCode::non_dense_index));
        CHECK(has_code(check.errors, ValidationCode::invalid_time_range));

        auto ok = make_transcript("d1", {{"s1", "a"}, {"s9", "b"}});
        std::vector<std::string> registered = {"s1", "s2"};
        auto warned = validate_transcript(ok, registered);
        CHECK(warned.errors.empty());
        REQUIRE(warned.warnings.size() == 1);
        CHECK(warned.warnings[0].detail == "s9");

        CHECK(has_code(validate_transcript(Transcript{"d", {}}).errors, ValidationCode::empty_transcript));
    }

    TEST_CASE("enum closure over a fuzz corpus") {
        std::vector<std::string> corpus = {
            "opinion", "ideas", "Idea!", "", " ", "builds_on", "build on", "buildson", "relates",
            "relate to", "contradicts", "similar", "leads-to", "climate2", "Clim ate", "conflicts",
            "communications", "transcripts", "conceptmap", "concept map", "null", "0", "ideä"};
        Gen gen(7);
        for (int i = 0; i < 300; ++i) {
            std::string s;
            const int len = gen.integer(1, 14);
            for (int k = 0; k < len; ++k) s.push_back(static_cast<char>(gen.integer(32, 126)));
            corpus.push_back(s);
        }
        auto is_valid_node = [](const std::string& s) {
            return std::any_of(kAllNodeTypes.begin(), kAllNodeTypes.end(),
                               [&](NodeType t) { return text::to_lower(text::trim(s)) == to_string(t); });
        };
        auto is_valid_edge = [](const std::string& s) {
            return std::any_of(kAllEdgeTypes.begin(), kAllEdgeTypes.end(),
                               [&](EdgeType t) { return text::to_lower(text::trim(s)) == to_string(t); });
        };
        auto is_valid_dim = [](const std::string& s) {
            return std::any_of(kAllDimensions.begin(), kAllDimensions.end(),
                               [&](Dimension d) { return text::to_lower(text::trim(s)) == to_string(d); });
        };
        auto t = make_transcript("d1", {{"s1", "hi"}, {"s2", "there"}});
        for (const auto& s : corpus) {
            json doc = two_node_map();
            doc["nodes"][0]["node_type"] = s;
            CHECK(check_concept_map_json(doc, t).empty() == is_valid_node(s));

            doc = two_node_map();
            doc["edges"][0]["edge_type"] = s;
            CHECK(check_concept_map_json(doc, t).empty() == is_valid_edge(s));

            json a = make_assessment("d1", {1, 2, 3, 4, 5, 6, 7});
            a["dimensions"][0]["dimension"] = s;
            const bool same_as_first = text::to_lower(text::trim(s)) == "climate";
            CHECK(check_assessment_json(a).empty() == (is_valid_dim(s) && same_as_first));
        }
        for (auto t2 : kAllNodeTypes) CHECK(parse_node_type(to_string(t2)) == t2);
        for (auto t2 : kAllEdgeTypes) CHECK(parse_edge_type(to_string(t2)) == t2);
        for (auto d : kAllDimensions) CHECK(parse_dimension(display_name(d)) == d);
    }
}

TEST_SUITE("core.serialize") {
    TEST_CASE("empty map renders header lines only") {
        ConceptMap m;
        m.discussion_id = "d1";
        CHECK(serialize_concept_map_text(m) == "Concept map for discussion d1\nNodes: 0; Edges: 0\n");
    }

    TEST_CASE("one node, no edges") {
        ConceptMap m;
        m.discussion_id = "d1";
        m.nodes.push_back({"n1", "Solar panels", NodeType::idea, "Power the pump", {}, {}});
        const auto out = serialize_concept_map_text(m);
        CHECK(out == "Concept map for discussion d1\nNodes: 1; Edges: 0\n[idea] Solar panels — Power the pump\n");
    }

    TEST_CASE("two nodes and a builds-on edge, byte exact") {
        CHECK(serialize_concept_map_text(two_node_map()) ==
              "Concept map for discussion d1\n"
              "Nodes: 2; Edges: 1\n"
              "[idea] A — first thought\n"
              "[solution] B\n"
              "B --builds on--> A\n");
    }

    TEST_CASE("invalid map is rejected") {
        auto m = two_node_map();
        m.edges[0].target = "nope";
        CHECK_THROWS_AS(serialize_concept_map_text(m), Error);
    }

    TEST_CASE("assessment with empty evidence prints the marker") {
        const auto out = serialize_assessment_text(make_assessment("d1", {78, 78, 69, 53, 63, 67, 69}));
        std::size_t markers = 0;
        for (std::size_t pos = 0; (pos = out.find("(no key evidence)", pos)) != std::string::npos; ++pos) ++markers;
        CHECK(markers == 7);
        CHECK(out.find("Climate (78/100):\n") != std::string::npos);
    }

    TEST_CASE("dimension order is canonical regardless of input order") {
        auto a = make_assessment("d1", {1, 2, 3, 4, 5, 6, 7});
        auto b = a;
        std::reverse(b.dimensions.begin(), b.dimensions.end());
        CHECK(serialize_assessment_text(a) == serialize_assessment_text(b));
        const auto out = serialize_assessment_text(a);
        std::size_t last = 0;
        for (auto d : kAllDimensions) {
            const auto pos = out.find(std::string(display_name(d)) + " (");
            REQUIRE(pos != std::string::npos);
            CHECK(pos >= last);
            last = pos;
        }
    }

    TEST_CASE("golden assessment rendering") {
        auto a = make_assessment("fixture-1", {78, 78, 69, 53, 63, 67, 69});
        a.dimensions[0].key_evidence = {"I like how everyone is laughing", "thanks for that"};
        a.dimensions[3].key_evidence = {"no, I disagree\nstrongly"};
        check_golden("assessment_fixture.txt", serialize_assessment_text(a));
    }

    TEST_CASE("serialization is a pure function of its input") {
        Gen gen(11);
        for (int i = 0; i < 50; ++i) {
            auto t = gen.transcript("d" + std::to_string(i));
            auto m = gen.concept_map(t);
            auto a = gen.assessment(t.discussion_id);
            CHECK(serialize_concept_map_text(m) == serialize_concept_map_text(ConceptMap(m)));
            CHECK(serialize_assessment_text(a) == serialize_assessment_text(SevenCAssessment(a)));
            CHECK(serialize_transcript_text(t) == serialize_transcript_text(t));
        }
    }

    TEST_CASE("oversized artifacts are cut at a line boundary") {
        ConceptMap m;
        m.discussion_id = "big";
        for (int i = 0; i < 2000; ++i) {
            m.nodes.push_back({"n" + std::to_string(i), "label " + std::to_string(i), NodeType::idea,
                               std::string(40, 'z'), {}, {}});
        }
        const auto out = serialize_concept_map_text(m);
        CHECK(out.size() <= kMaxArtifactTextChars);
        CHECK(out.ends_with("\n[truncated]\n"));
    }
}

TEST_SUITE("core.json") {
    TEST_CASE("round trip over random valid instances") {
        Gen gen(2024);
        for (int i = 0; i < 200; ++i) {
            auto t = gen.transcript("d" + std::to_string(i));
            auto m = gen.concept_map(t);
            auto a = gen.assessment(t.discussion_id);
            REQUIRE(validate_concept_map(m, t).empty());
            REQUIRE(validate_assessment(a).empty());
            CHECK(json(t).get<Transcript>() == t);
            CHECK(json::parse(canonical_dump(json(m))).get<ConceptMap>() == m);
            CHECK(json::parse(pretty_dump(json(a))).get<SevenCAssessment>() == a);
        }
    }

    TEST_CASE("enums use lowercase wire strings with spaces") {
        json doc = two_node_map();
        CHECK(doc["edges"][0]["edge_type"] == "builds on");
        json a = make_assessment("d1", {1, 2, 3, 4, 5, 6, 7});
        CHECK(a["dimensions"][0]["dimension"] == "climate");
    }

    TEST_CASE("anchors survive the round trip") {
        auto a = make_assessment("d1", {1, 2, 3, 4, 5, 6, 7});
        a.dimensions[2].key_evidence = {"x", "y"};
        a.dimensions[2].anchors = {{"x", 3, 1.0}, {"y", std::nullopt, 0.25}};
        CHECK(json(a).get<SevenCAssessment>() == a);
        CHECK(json(a)["dimensions"][2]["evidence_anchors"][1]["utterance_index"].is_null());
    }

    TEST_CASE("timestamps") {
        CHECK(format_iso8601(Timestamp{0}) == "1970-01-01T00:00:00.000Z");
        CHECK(format_iso8601(Timestamp{1790000000123}) == "2026-09-21T14:13:20.123Z");
        CHECK(parse_iso8601("2026-09-21T14:13:20.123Z").epoch_ms == 1790000000123);
        CHECK(parse_iso8601("2026-09-21T14:13:20Z").epoch_ms == 1790000000000);
        CHECK_THROWS_AS(parse_iso8601("yesterday"), Error);
        Gen gen(5);
        for (int i = 0; i < 100; ++i) {
            Timestamp ts{static_cast<std::int64_t>(gen.integer(-100000, 100000)) * 86400000 + gen.integer(0, 86399999)};
            CHECK(parse_iso8601(format_iso8601(ts)) == ts);
        }
    }
}

TEST_SUITE("core.anchor") {
    const auto transcript = make_transcript("d1", {{"s1", "Hello everyone, let's start."},
                                                   {"s2", "the budget plan..."},
                                                   {"s1", "I think the sensor is broken."}});

    TEST_CASE("verbatim utterance anchors with score 1") {
        auto a = anchor_evidence("I think the sensor is broken.", transcript);
        REQUIRE(a.utterance_index);
        CHECK(*a.utterance_index == 2);
        CHECK(a.match_score == 1.0);
    }

    TEST_CASE("normalization handles case, spacing and punctuation") {
        auto a = anchor_evidence("THE budget  plan", transcript);
        REQUIRE(a.utterance_index);
        CHECK(*a.utterance_index == 1);
        CHECK(a.match_score == 1.0);
    }

    TEST_CASE("absent excerpt stays unanchored") {
        const std::string excerpt = "we should paint the boat green";
        auto a = anchor_evidence(excerpt, transcript);
        CHECK_FALSE(a.utterance_index);
        double best = 0.0;
        const auto needle = text::normalize_for_match(excerpt);
        for (const auto& u : transcript.utterances) {
            const auto hay = text::normalize_for_match(u.text);
            const double sim = 1.0 - static_cast<double>(edit_distance_oracle(needle, hay)) /
                                         static_cast<double>(std::max(needle.size(), hay.size()));
            best = std::max(best, sim);
        }
        CHECK(best < kAnchorThreshold);
        CHECK(a.match_score == doctest::Approx(best).epsilon(1e-12));
    }

    TEST_CASE("near-miss excerpt above the threshold is anchored by similarity") {
        auto a = anchor_evidence("I think the sensors is broken", transcript);
        REQUIRE(a.utterance_index);
        CHECK(*a.utterance_index == 2);
        CHECK(a.match_score < 1.0);
        CHECK(a.match_score >= kAnchorThreshold);
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS(anchor_evidence("", transcript), Error);
        CHECK_THROWS_AS(anchor_evidence("x", Transcript{"d", {}}), Error);
    }

    TEST_CASE("substring of an utterance anchors at the first utterance containing it") {
        Gen gen(99);
        for (int i = 0; i < 300; ++i) {
            auto t = gen.transcript("d", 1, 10);
            const auto& u = t.utterances[gen.index(t.utterances.size())];
            auto words = text::split_words(u.text);
            const auto from = gen.index(words.size());
            const auto to = from + 1 + gen.index(words.size() - from);
            std::string excerpt;
            for (auto k = from; k < to; ++k) excerpt += (excerpt.empty() ? "" : " ") + words[k];
            if (text::normalize_for_match(excerpt).empty()) continue;
            auto a = anchor_evidence(excerpt, t);
            REQUIRE(a.utterance_index);
            CHECK(a.match_score == 1.0);
            const auto needle = text::normalize_for_match(excerpt);
            std::size_t first = 0;
            while (text::normalize_for_match(t.utterances[first].text).find(needle) == std::u32string::npos) ++first;
            CHECK(*a.utterance_index == first);
        }
    }
}

TEST_SUITE("core.text") {
    TEST_CASE("tokenizer lowercases beyond ASCII and splits on punctuation") {
        CHECK(text::tokenize("Ünïcode CAFÉ—naïve, OK?!") ==
              std::vector<std::string>{"ünïcode", "café", "naïve", "ok"});
        CHECK(text::tokenize("  ...  ").empty());
    }

    TEST_CASE("levenshtein matches the recursive oracle") {
        Gen gen(3);
        for (int i = 0; i < 200; ++i) {
            auto a = text::normalize_for_match(gen.sentence(0, 4));
            auto b = text::normalize_for_match(gen.sentence(0, 4));
            CHECK(text::levenshtein(a, b) == edit_distance_oracle(a, b));
        }
    }

    TEST_CASE("sentences") {
        CHECK(text::split_sentences("One. Two? Three! ") == std::vector<std::string>{"One", "Two", "Three"});
        CHECK(text::split_sentences("hello") == std::vector<std::string>{"hello"});
    }
}
