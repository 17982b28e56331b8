#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ragopt/mmkp.hpp"
#include "ragopt/nli.hpp"

namespace ragopt {

struct RetrievalConfig {
    int dim = 64; // stand-in embedder dimension
    int n = 20;   // fused candidates handed to the selector
    int k_rrf = 60;
    int expand_m = 5;
    int max_features = 200000;
};

struct MmkpSelectorConfig {
    std::string selector = "mmkp"; // "mmkp" | "topk" (budget-filled ablation)
    std::int64_t c_token = 1500;
    double c_red = 120.0;
    double alpha = 0.7;
    double beta = 0.3;
    double tau = 0.82;
    double lambda_red = 100.0;

    MmkpParams params() const {
        return MmkpParams{c_token, c_red, alpha, beta, tau, lambda_red};
    }
};

struct MctsSearchConfig {
    int n_sim = 24;
    int k = 3;
    int max_depth = 3;
    double c_puct = 1.4;
};

struct OraclesConfig {
    std::string mode = "mock"; // "mock" | "remote"
    std::string embedder_url;
    std::string generator_url;
    std::string verifier_url;
    int timeout_ms = 2000;
};

struct PipelineConfig {
    RetrievalConfig retrieval;
    MmkpSelectorConfig mmkp;
    MctsSearchConfig mcts;
    RewardWeights reward;
    OraclesConfig oracles;
};

// Flat `section.key = value` document; '#' starts a comment. Unknown keys and
// out-of-range values are rejected. parse/serialize round-trips exactly.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& config);

void validate_config(const PipelineConfig& config);

} // namespace ragopt
