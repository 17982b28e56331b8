#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ragopt/nli.hpp"

namespace ragopt {

// Open-domain QA normalization: lowercase, strip punctuation, drop the
// articles a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view text);

// Token stream for F1 overlap: lowercased, punctuation stripped, articles
// kept.
std::vector<std::string> f1_tokens(std::string_view text);

// 1 iff the normalized prediction equals any normalized gold.
int exact_match(const std::string& pred, const std::vector<std::string>& golds);

// Multiset token overlap F1, maximized over golds; 0/0 conventions map to 0.
double f1_score(const std::string& pred, const std::vector<std::string>& golds);

// |top-5-of-selected  ∩ gold| / |gold|; selections shorter than 5 are used
// whole. selected_ids must already be ordered by descending fusion score.
double recall_at_5(const std::vector<std::string>& selected_ids,
                   const std::vector<std::string>& gold_passage_ids);

struct FaithfulnessResult {
    double ap = 0.0; // sentences whose best verdict is entailment-dominant
    double cr = 0.0; // sentences whose best verdict is contradiction-dominant
};

// Sentence-level attribution precision and contradiction rate. The best
// verdict per sentence is the one maximizing weights.apply over the evidence
// set, matching the reward's max rule. Empty answers give (0, 0).
FaithfulnessResult faithfulness_metrics(const std::string& answer,
                                        const EvidenceSet& evidence, const NliOracle& nli,
                                        const RewardWeights& weights = {});

} // namespace ragopt
