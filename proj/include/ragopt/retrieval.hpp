#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragopt/corpus.hpp"

namespace ragopt {

// One fused retrieval result. fusion_score = 1/(k_rrf + dense_rank)
// + 1/(k_rrf + sparse_rank); dense_sim is cosine against the expanded query.
struct ScoredChunk {
    std::string chunk_id;
    int dense_rank = 0;
    int sparse_rank = 0;
    double fusion_score = 0.0;
    double dense_sim = 0.0;
};

// TF-IDF index over 1- and 2-grams with smoothed idf and L2-normalized rows.
struct SparseIndex {
    std::unordered_map<std::string, std::uint32_t> vocabulary; // term -> column
    std::vector<double> idf;                                   // per column
    // Row i corresponds to store chunk i; column -> weight.
    std::vector<std::unordered_map<std::uint32_t, double>> doc_vectors;

    // Weight of a term in a document row; 0 when out of vocabulary.
    double weight(std::size_t doc, const std::string& term) const;
};

// u.v / (|u||v|), clamped to [-1, 1]. Throws on dimension mismatch.
// Returns 0 when either vector is all-zero (cannot occur post-ingest).
double cosine(std::span<const float> u, std::span<const float> v);

// Lowercased unigrams plus adjacent-pair bigrams joined by a single space.
std::vector<std::string> ngrams_1_2(std::string_view text);

// Smoothed idf = ln((1+N)/(1+df)) + 1. When distinct n-grams exceed
// max_features, keeps the highest-document-frequency terms, ties broken by
// lexicographic order.
SparseIndex build_sparse_index(const ChunkStore& store, std::size_t max_features);

// Query text -> L2-normalized tf-idf weights over the index vocabulary.
std::unordered_map<std::uint32_t, double> sparse_query_vector(const SparseIndex& index,
                                                              std::string_view text);

// Every chunk id ranked descending by cosine against q_vec, ties by id.
std::vector<std::string> dense_ranking(const ChunkStore& store, std::span<const float> q_vec);

// Every chunk id ranked descending by sparse score, ties by id.
std::vector<std::string> sparse_ranking(const ChunkStore& store, const SparseIndex& index,
                                        std::string_view query_text);

// Reciprocal rank fusion of two rankings over the same id set (ranks start
// at 1). Result is sorted by descending fusion score, ties by id. Throws when
// an id appears in only one ranking.
std::vector<ScoredChunk> rrf_fuse(const std::vector<std::string>& dense,
                                  const std::vector<std::string>& sparse, int k_rrf);

// Centroid query expansion: L2-normalized mean of q_vec and the embeddings of
// its top-m chunks by cosine (m clamps to the corpus size).
std::vector<float> expand_query(std::span<const float> q_vec, const ChunkStore& store,
                                std::size_t m);

struct RetrievalParams {
    int n = 20;
    int k_rrf = 60;
    int expand_m = 5;
};

// Dense leg uses the expanded query vector, sparse leg the raw query text;
// fused list is truncated to n. Empty store gives an empty result.
std::vector<ScoredChunk> retrieve(const ChunkStore& store, const SparseIndex& index,
                                  std::string_view query_text, std::span<const float> q_vec,
                                  const RetrievalParams& params);

} // namespace ragopt
