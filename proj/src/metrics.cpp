#include "ragopt/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <sstream>

#include "ragopt/errors.hpp"

namespace ragopt {

namespace {

std::string lowercase_strip_punct(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        if (std::ispunct(c)) continue;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

bool is_article(const std::string& tok) {
    return tok == "a" || tok == "an" || tok == "the";
}

std::vector<std::string> whitespace_split(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

} // namespace

std::string normalize_answer(std::string_view text) {
    std::string joined;
    for (const std::string& tok : whitespace_split(lowercase_strip_punct(text))) {
        if (is_article(tok)) continue;
        if (!joined.empty()) joined += ' ';
        joined += tok;
    }
    return joined;
}

std::vector<std::string> f1_tokens(std::string_view text) {
    return whitespace_split(lowercase_strip_punct(text));
}

int exact_match(const std::string& pred, const std::vector<std::string>& golds) {
    if (golds.empty()) throw ValidationError("exact_match: golds must be non-empty");
    const std::string norm_pred = normalize_answer(pred);
    for (const std::string& gold : golds) {
        if (norm_pred == normalize_answer(gold)) return 1;
    }
    return 0;
}

double f1_score(const std::string& pred, const std::vector<std::string>& golds) {
    if (golds.empty()) throw ValidationError("f1_score: golds must be non-empty");
    const std::vector<std::string> pred_tokens = f1_tokens(pred);
    std::map<std::string, int> pred_counts;
    for (const std::string& t : pred_tokens) pred_counts[t]++;

    double best = 0.0;
    for (const std::string& gold : golds) {
        const std::vector<std::string> gold_tokens = f1_tokens(gold);
        std::map<std::string, int> gold_counts;
        for (const std::string& t : gold_tokens) gold_counts[t]++;

        int overlap = 0;
        for (const auto& [tok, count] : pred_counts) {
            auto it = gold_counts.find(tok);
            if (it != gold_counts.end()) overlap += std::min(count, it->second);
        }
        if (overlap == 0 || pred_tokens.empty() || gold_tokens.empty()) continue;
        double precision = static_cast<double>(overlap) / pred_tokens.size();
        double recall = static_cast<double>(overlap) / gold_tokens.size();
        best = std::max(best, 2.0 * precision * recall / (precision + recall));
    }
    return best;
}

double recall_at_5(const std::vector<std::string>& selected_ids,
                   const std::vector<std::string>& gold_passage_ids) {
    if (gold_passage_ids.empty()) {
        throw ValidationError("recall_at_5: gold passage ids must be non-empty");
    }
    const std::size_t take = std::min<std::size_t>(5, selected_ids.size());
    int hits = 0;
    for (const std::string& gold : gold_passage_ids) {
        for (std::size_t i = 0; i < take; ++i) {
            if (selected_ids[i] == gold) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(gold_passage_ids.size());
}

FaithfulnessResult faithfulness_metrics(const std::string& answer,
                                        const EvidenceSet& evidence, const NliOracle& nli,
                                        const RewardWeights& weights) {
    if (evidence.snippets.empty()) {
        throw ValidationError("faithfulness_metrics: evidence set must be non-empty");
    }
    const std::vector<std::string> sentences = split_sentences(answer);
    FaithfulnessResult result;
    if (sentences.empty()) return result;

    int entailed = 0;
    int contradicted = 0;
    for (const std::string& sentence : sentences) {
        NliVerdict best_verdict;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const std::string& snippet : evidence.snippets) {
            NliVerdict v = nli.verdict(snippet, sentence);
            double score = weights.apply(v);
            if (score > best_score) {
                best_score = score;
                best_verdict = v;
            }
        }
        if (best_verdict.p_ent > best_verdict.p_neu && best_verdict.p_ent > best_verdict.p_con) {
            ++entailed;
        } else if (best_verdict.p_con > best_verdict.p_ent &&
                   best_verdict.p_con > best_verdict.p_neu) {
            ++contradicted;
        }
    }
    result.ap = static_cast<double>(entailed) / sentences.size();
    result.cr = static_cast<double>(contradicted) / sentences.size();
    return result;
}

} // namespace ragopt
