#include "ragopt/nli.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include "ragopt/corpus.hpp"
#include "ragopt/errors.hpp"

namespace ragopt {

namespace {

// Lowercase whitespace tokens with edge punctuation stripped, so a
// sentence-final "1995." still matches the evidence token "1995".
std::set<std::string> bare_token_set(std::string_view text) {
    std::set<std::string> tokens;
    for (std::string& tok : lowercase_tokens(text)) {
        std::size_t begin = 0;
        std::size_t end = tok.size();
        while (begin < end && !std::isalnum(static_cast<unsigned char>(tok[begin]))) ++begin;
        while (end > begin && !std::isalnum(static_cast<unsigned char>(tok[end - 1]))) --end;
        if (end > begin) tokens.insert(tok.substr(begin, end - begin));
    }
    return tokens;
}

bool is_numeric(const std::string& tok) {
    return !tok.empty() &&
           std::all_of(tok.begin(), tok.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

std::set<std::string> numeric_subset(const std::set<std::string>& tokens) {
    std::set<std::string> numbers;
    for (const std::string& t : tokens) {
        if (is_numeric(t)) numbers.insert(t);
    }
    return numbers;
}

} // namespace

NliVerdict MockNli::verdict(const std::string& premise, const std::string& hypothesis) const {
    const std::set<std::string> evidence = bare_token_set(premise);
    const std::set<std::string> sentence = bare_token_set(hypothesis);

    if (std::includes(evidence.begin(), evidence.end(), sentence.begin(), sentence.end())) {
        return {0.9, 0.1, 0.0};
    }

    const std::set<std::string> ev_nums = numeric_subset(evidence);
    const std::set<std::string> se_nums = numeric_subset(sentence);
    if (!ev_nums.empty() && !se_nums.empty()) {
        std::vector<std::string> common;
        std::set_intersection(ev_nums.begin(), ev_nums.end(), se_nums.begin(), se_nums.end(),
                              std::back_inserter(common));
        if (common.empty()) return {0.0, 0.1, 0.9};
    }
    return {0.1, 0.8, 0.1};
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::string cur;
    auto flush = [&] {
        std::size_t begin = cur.find_first_not_of(" \t\r\n");
        if (begin != std::string::npos) {
            std::size_t end = cur.find_last_not_of(" \t\r\n");
            sentences.push_back(cur.substr(begin, end - begin + 1));
        }
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        cur.push_back(c);
        if (c == '.' || c == '?' || c == '!') {
            bool at_end = i + 1 == text.size();
            bool before_space =
                !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
            if (at_end || before_space) flush();
        }
    }
    flush();
    return sentences;
}

double compute_reward(const std::string& answer, const EvidenceSet& evidence,
                      const RewardWeights& weights, const NliOracle& nli) {
    if (evidence.snippets.empty()) {
        throw ValidationError("compute_reward: evidence set must be non-empty");
    }
    std::vector<std::string> sentences = split_sentences(answer);
    if (sentences.empty()) return 0.0; // neutral, avoids degenerate empty optima

    double total = 0.0;
    for (const std::string& sentence : sentences) {
        double best = -std::numeric_limits<double>::infinity();
        for (const std::string& snippet : evidence.snippets) {
            best = std::max(best, weights.apply(nli.verdict(snippet, sentence)));
        }
        total += best;
    }
    return total / static_cast<double>(sentences.size());
}

} // namespace ragopt
