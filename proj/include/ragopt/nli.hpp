#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ragopt {

// Entail / neutral / contradict probabilities; components sum to 1 (+-1e-6).
struct NliVerdict {
    double p_ent = 0.0;
    double p_neu = 0.0;
    double p_con = 0.0;
};

// Contradictions carry a severe negative weight by contract (w_con < 0).
struct RewardWeights {
    double w_ent = 1.0;
    double w_neu = -0.2;
    double w_con = -2.0;

    double apply(const NliVerdict& v) const {
        return w_ent * v.p_ent + w_neu * v.p_neu + w_con * v.p_con;
    }
};

struct EvidenceSet {
    std::vector<std::string> snippets;
};

// Verifier contract: a pure function of the (premise, hypothesis) pair.
// Failures surface as OracleError, never as a low reward.
class NliOracle {
public:
    virtual ~NliOracle() = default;
    virtual NliVerdict verdict(const std::string& premise,
                               const std::string& hypothesis) const = 0;
};

// Deterministic stand-in verifier:
//   sentence tokens a subset of evidence tokens        -> (0.9, 0.1, 0.0)
//   both sides contain numbers, numeric sets disjoint  -> (0.0, 0.1, 0.9)
//   otherwise                                          -> (0.1, 0.8, 0.1)
// Tokens are lowercased and stripped of edge punctuation.
class MockNli : public NliOracle {
public:
    NliVerdict verdict(const std::string& premise,
                       const std::string& hypothesis) const override;
};

// Split on '.', '?', '!' followed by whitespace or end of text; trims
// whitespace, drops empties. Text without a terminator is one sentence.
// Abbreviations split too ("Mr. X" -> two sentences); accepted for
// determinism.
std::vector<std::string> split_sentences(std::string_view text);

// Eq-style sentence reward: mean over answer sentences of the max over
// evidence snippets of weights.apply(verdict). Empty answer scores 0.
double compute_reward(const std::string& answer, const EvidenceSet& evidence,
                      const RewardWeights& weights, const NliOracle& nli);

} // namespace ragopt
