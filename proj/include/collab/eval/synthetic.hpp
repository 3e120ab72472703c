#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collab/core/types.hpp"
#include "collab/eval/retrieval_eval.hpp"
#include "collab/index/retrieval.hpp"

namespace collab::eval {

struct SyntheticDiscussion {
    Transcript transcript;
    ConceptMap concept_map;
    SevenCAssessment assessment;
    std::string topic;  // subject vocabulary, present in the transcript
    std::string trait;  // evaluative vocabulary, present only in the assessment
};

struct SyntheticCorpus {
    std::uint64_t seed = 0;
    std::vector<SyntheticDiscussion> discussions;
    // Ten direct queries built from topic words and ten analytical queries
    // built from trait words.
    std::vector<RetrievalEvalCase> cases;
};

// Topics and traits are each assigned round-robin over a seeded shuffle, so
// every topic covers two discussions and every trait three (for 30 discussions).
// Transcripts mix topic words with neutral filler; evaluative words appear only
// in assessment analyses. Concept maps come from the mock generation rule.
// Identical seeds give identical corpora. Throws Error(invalid_argument) for
// fewer than 20 discussions.
SyntheticCorpus generate_vocabulary_gap_corpus(std::uint64_t seed, std::size_t discussions = 30);

// Indexes every transcript, concept map and assessment of the corpus.
void index_corpus(const SyntheticCorpus& corpus, index::Retriever& retriever);

}  // namespace collab::eval
