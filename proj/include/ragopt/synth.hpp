#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ragopt/corpus.hpp"

namespace ragopt {

// Redundancy-trap dataset: per query, a cluster of near-duplicate chunks
// about one entity crowds the token budget ahead of a distinct chunk holding
// the complementary fact. Budget-filled top-k keeps two duplicates and drops
// the distinct gold; a selector that collapses the cluster keeps both facts.
struct SynthParams {
    int n_queries = 20;
    int n_fillers = 5;
    std::int64_t dup_tokens = 600;    // declared token_len per duplicate
    std::int64_t gold_tokens = 300;   // distinct gold chunk
    std::int64_t filler_tokens = 200; // background chunks
};

struct SynthDataset {
    std::vector<Chunk> chunks; // token_len set explicitly, embedding left to load
    std::vector<QueryRecord> queries;
};

SynthDataset make_synth_dataset(const SynthParams& params = {});

void write_synth_dataset(const SynthDataset& dataset,
                         const std::filesystem::path& corpus_path,
                         const std::filesystem::path& queries_path);

} // namespace ragopt
