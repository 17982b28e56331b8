#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragopt/config.hpp"
#include "ragopt/corpus.hpp"
#include "ragopt/mcts.hpp"

namespace ragopt {

struct QueryOutcome {
    std::string id;
    bool failed = false;
    std::string error;
    double em = 0.0;
    double f1 = 0.0;
    double recall5 = 0.0;
    double reward = 0.0;
    double ap = 0.0;
    double cr = 0.0;
    std::vector<std::string> selected_ids; // descending fusion order
    std::string answer;
};

struct EvalAggregates {
    double em = 0.0;
    double f1 = 0.0;
    double recall5 = 0.0;
    double reward = 0.0;
    double ap = 0.0;
    double cr = 0.0;
};

// Deterministic counters only; wall-clock stays out of the report so runs
// with the same seed are byte-identical.
struct EvalCounters {
    int queries = 0;
    int failed = 0;
    std::int64_t selected_chunks = 0;
    std::int64_t mcts_nodes = 0;
};

struct EvalReport {
    EvalAggregates aggregates; // means over non-failed queries
    EvalCounters counters;
    std::vector<QueryOutcome> per_query;
};

struct EvalOptions {
    std::uint64_t seed = 0;
};

// Full pipeline per query: retrieve -> select context -> search -> metrics.
// Per-query failures are recorded and the run continues.
EvalReport run_eval(const PipelineConfig& config, const std::filesystem::path& corpus_path,
                    const std::filesystem::path& queries_path, const EvalOptions& options);

// More than 10% failed queries means the oracle failure budget is exceeded.
bool failure_budget_exceeded(const EvalReport& report);

nlohmann::json report_to_json(const EvalReport& report, const PipelineConfig& config,
                              const EvalOptions& options);
std::string report_summary(const EvalReport& report);

// Mock generation policy: proposes sentences drawn from the context chunks,
// ranked by lexical overlap with the query. Deterministic for a fixed seed
// (the seed only perturbs tie-breaking jitter).
class ExtractivePolicy : public PolicyOracle {
public:
    ExtractivePolicy(const ChunkStore& store, std::uint64_t seed);
    std::vector<Proposal> propose(const PlannerState& state, int k) const override;

private:
    const ChunkStore* store_;
    std::uint64_t seed_;
};

} // namespace ragopt
