#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragopt/corpus.hpp"
#include "ragopt/retrieval.hpp"

namespace ragopt {

// Semantic cluster of candidate chunks. Greedy clustering guarantees
// similarity of each member to the centroid at assignment time, not pairwise.
struct Group {
    int index = 0;
    std::vector<std::string> member_ids; // assignment order
    std::vector<float> centroid;         // unit-normalized mean of members
};

struct MmkpItem {
    std::string chunk_id;
    int group_index = 0;
    double value = 0.0;         // >= 0
    std::int64_t cost_token = 0;
    double cost_red = 0.0;      // quantized to 2 decimals
};

// Groups of items under a 2-dimensional capacity (token budget, redundancy
// budget). capacity_red may carry the +inf sentinel (max finite double).
struct MmkpInstance {
    std::vector<std::vector<MmkpItem>> groups;
    std::int64_t capacity_token = 0;
    double capacity_red = 0.0;

    static constexpr double kRedInfinity = std::numeric_limits<double>::max();
};

struct MmkpSolution {
    std::vector<std::string> selected; // sorted ascending
    double total_value = 0.0;
    std::int64_t cost_token = 0;
    double cost_red = 0.0;
};

struct MmkpParams {
    std::int64_t c_token = 1500;
    double c_red = 120.0;
    double alpha = 0.7;
    double beta = 0.3;
    double tau = 0.82;
    double lambda_red = 100.0;
};

// --- Instance construction ---------------------------------------------

// Greedy clustering: walk candidates in descending fusion score and attach
// each to the first group whose centroid cosine >= tau, else open a new
// group. Centroids are recomputed after every assignment.
std::vector<Group> group_chunks(const std::vector<ScoredChunk>& candidates,
                                const ChunkStore& store, double tau);

// Min-max normalization to [0,1]; a constant list maps to all-ones.
std::vector<double> minmax_normalize(const std::vector<double>& scores);

// alpha * normalized fusion + beta * (1 - cos(chunk, centroid)), clamped at 0.
// Callers normalize fusion scores across the candidate list first.
double item_utility(double fusion_norm, std::span<const float> chunk_vec,
                    std::span<const float> centroid, double alpha, double beta);

struct CostPair {
    std::int64_t token = 0;
    double red = 0.0;
};

// token cost = chunk token count; redundancy cost = lambda_red * mean cosine
// to the other group members (0 for singletons), rounded to 2 decimals.
CostPair item_costs(const Chunk& chunk, const Group& group, const ChunkStore& store,
                    double lambda_red);

struct BuiltInstance {
    std::vector<Group> groups;
    MmkpInstance instance;
};

BuiltInstance build_instance(const std::vector<ScoredChunk>& candidates,
                             const ChunkStore& store, const MmkpParams& params);

// --- Solvers -------------------------------------------------------------

// Exhaustive enumeration over all per-group choices (including skip).
// Guarded by prod(|G_i|+1) <= 2^24; larger instances must use the DP.
// Ties: value desc, then fewer items, then lexicographically smallest id list.
MmkpSolution solve_exact(const MmkpInstance& instance);

struct DpOptions {
    bool prune = true; // disable to validate pruning soundness
};

// Pareto-pruned dynamic programming over (cost_token, cost_red) -> value
// states. Discards a state only under strict domination (<= in both costs,
// >= in value, not identical); same tie-break as solve_exact.
MmkpSolution solve_pareto_dp(const MmkpInstance& instance, const DpOptions& options = {});

struct FptasResult {
    std::vector<std::size_t> selected; // item indices, ascending
    double value = 0.0;
};

// Scaled-value min-weight DP: K = eps * max(v) / n, v'_i = floor(v_i / K).
// Returned value is >= (1 - eps) * OPT with weight <= capacity.
FptasResult fptas_knapsack(const std::vector<double>& values,
                           const std::vector<double>& weights, double capacity, double eps);

// 0/1 knapsack as MMKP: per item one group holding the real item and a
// zero-cost zero-value dummy; capacity (C, +inf sentinel).
MmkpInstance reduce_knapsack_to_mmkp(const std::vector<double>& values,
                                     const std::vector<std::int64_t>& weights,
                                     std::int64_t capacity);

// --- Selection pipeline ---------------------------------------------------

struct SelectionResult {
    MmkpSolution solution;
    std::vector<std::string> context; // selected ids by descending fusion score
    std::vector<Group> groups;
};

SelectionResult select_context(const std::vector<ScoredChunk>& candidates,
                               const ChunkStore& store, const MmkpParams& params);

// Ablation comparator: maximal fusion-ordered prefix fitting the token budget.
std::vector<std::string> select_topk_budget(const std::vector<ScoredChunk>& candidates,
                                            const ChunkStore& store, std::int64_t c_token);

// --- Fixtures --------------------------------------------------------------

nlohmann::json instance_to_json(const MmkpInstance& instance);
MmkpInstance instance_from_json(const nlohmann::json& j);
nlohmann::json solution_to_json(const MmkpSolution& solution);

struct InstanceGenParams {
    int max_groups = 12;
    int max_items_per_group = 4;
    std::int64_t max_token_cost = 50;
    std::int64_t max_red_centi = 2000; // red costs in [0, 20.00]
};

// Seeded instances with dyadic values (multiples of 1/64) so value sums are
// exact in double arithmetic.
MmkpInstance random_instance(std::mt19937_64& rng, const InstanceGenParams& params = {});

struct KnapsackInstance {
    std::vector<double> values;
    std::vector<std::int64_t> weights;
    std::int64_t capacity = 0;
};

KnapsackInstance random_knapsack(std::mt19937_64& rng, int max_items);

} // namespace ragopt
