#include "ragopt/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ragopt/errors.hpp"
#include "ragopt/kernels.hpp"

namespace ragopt {

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) {
        std::ostringstream os;
        os << "cosine dimension mismatch: " << u.size() << " vs " << v.size();
        throw ValidationError(os.str());
    }
    double nu = std::sqrt(static_cast<double>(kernels::norm_sq(u.data(), u.size())));
    double nv = std::sqrt(static_cast<double>(kernels::norm_sq(v.data(), v.size())));
    if (nu == 0.0 || nv == 0.0) return 0.0;
    double c = static_cast<double>(kernels::dot(u.data(), v.data(), u.size())) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

std::vector<std::string> ngrams_1_2(std::string_view text) {
    std::vector<std::string> unigrams = lowercase_tokens(text);
    std::vector<std::string> grams = unigrams;
    grams.reserve(unigrams.size() * 2);
    for (std::size_t i = 0; i + 1 < unigrams.size(); ++i) {
        grams.push_back(unigrams[i] + " " + unigrams[i + 1]);
    }
    return grams;
}

double SparseIndex::weight(std::size_t doc, const std::string& term) const {
    auto v = vocabulary.find(term);
    if (v == vocabulary.end()) return 0.0;
    const auto& row = doc_vectors[doc];
    auto w = row.find(v->second);
    return w == row.end() ? 0.0 : w->second;
}

SparseIndex build_sparse_index(const ChunkStore& store, std::size_t max_features) {
    if (store.empty()) throw ValidationError("build_sparse_index: empty store");

    const std::size_t n_docs = store.size();
    std::vector<std::unordered_map<std::string, std::int64_t>> tf(n_docs);
    std::map<std::string, std::int64_t> df; // ordered for deterministic ties
    for (std::size_t d = 0; d < n_docs; ++d) {
        for (std::string& g : ngrams_1_2(store.at(d).text)) {
            if (tf[d][g]++ == 0) df[g]++;
        }
    }

    SparseIndex index;
    if (df.size() > max_features) {
        // (df desc, term asc) — keep the first max_features.
        std::vector<std::pair<std::string, std::int64_t>> terms(df.begin(), df.end());
        std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        terms.resize(max_features);
        std::sort(terms.begin(), terms.end()); // columns in lexicographic order
        for (const auto& [term, count] : terms) {
            index.idf.push_back(std::log((1.0 + n_docs) / (1.0 + count)) + 1.0);
            index.vocabulary.emplace(term, static_cast<std::uint32_t>(index.vocabulary.size()));
        }
    } else {
        for (const auto& [term, count] : df) {
            index.idf.push_back(std::log((1.0 + n_docs) / (1.0 + count)) + 1.0);
            index.vocabulary.emplace(term, static_cast<std::uint32_t>(index.vocabulary.size()));
        }
    }

    index.doc_vectors.resize(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        auto& row = index.doc_vectors[d];
        double norm_sq = 0.0;
        for (const auto& [term, count] : tf[d]) {
            auto v = index.vocabulary.find(term);
            if (v == index.vocabulary.end()) continue;
            double w = static_cast<double>(count) * index.idf[v->second];
            row[v->second] = w;
            norm_sq += w * w;
        }
        if (norm_sq > 0.0) {
            double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& [col, w] : row) w *= inv;
        }
    }
    return index;
}

std::unordered_map<std::uint32_t, double> sparse_query_vector(const SparseIndex& index,
                                                              std::string_view text) {
    std::unordered_map<std::uint32_t, double> vec;
    double norm_sq = 0.0;
    std::unordered_map<std::string, std::int64_t> tf;
    for (std::string& g : ngrams_1_2(text)) tf[g]++;
    for (const auto& [term, count] : tf) {
        auto v = index.vocabulary.find(term);
        if (v == index.vocabulary.end()) continue;
        double w = static_cast<double>(count) * index.idf[v->second];
        vec[v->second] = w;
        norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [col, w] : vec) w *= inv;
    }
    return vec;
}

namespace {

// Descending by score, ties by lexicographic id.
std::vector<std::string> rank_ids(std::vector<std::pair<double, std::string>>& scored) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> ids;
    ids.reserve(scored.size());
    for (auto& [score, id] : scored) ids.push_back(std::move(id));
    return ids;
}

double sparse_dot(const std::unordered_map<std::uint32_t, double>& a,
                  const std::unordered_map<std::uint32_t, double>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    double acc = 0.0;
    for (const auto& [col, w] : small) {
        auto it = large.find(col);
        if (it != large.end()) acc += w * it->second;
    }
    return acc;
}

} // namespace

std::vector<std::string> dense_ranking(const ChunkStore& store, std::span<const float> q_vec) {
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(store.size());
    for (const Chunk& c : store.chunks()) {
        scored.emplace_back(cosine(q_vec, c.embedding), c.id);
    }
    return rank_ids(scored);
}

std::vector<std::string> sparse_ranking(const ChunkStore& store, const SparseIndex& index,
                                        std::string_view query_text) {
    auto q = sparse_query_vector(index, query_text);
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(store.size());
    for (std::size_t d = 0; d < store.size(); ++d) {
        scored.emplace_back(sparse_dot(q, index.doc_vectors[d]), store.at(d).id);
    }
    return rank_ids(scored);
}

std::vector<ScoredChunk> rrf_fuse(const std::vector<std::string>& dense,
                                  const std::vector<std::string>& sparse, int k_rrf) {
    if (k_rrf < 1) throw ValidationError("rrf_fuse: k_rrf must be positive");
    std::unordered_map<std::string, int> sparse_rank;
    sparse_rank.reserve(sparse.size());
    for (std::size_t i = 0; i < sparse.size(); ++i) {
        sparse_rank[sparse[i]] = static_cast<int>(i) + 1;
    }
    if (dense.size() != sparse.size()) {
        throw ValidationError("rrf_fuse: rankings cover different id sets");
    }

    std::vector<ScoredChunk> fused;
    fused.reserve(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) {
        auto it = sparse_rank.find(dense[i]);
        if (it == sparse_rank.end()) {
            throw ValidationError("rrf_fuse: id \"" + dense[i] + "\" present in one ranking only");
        }
        ScoredChunk sc;
        sc.chunk_id = dense[i];
        sc.dense_rank = static_cast<int>(i) + 1;
        sc.sparse_rank = it->second;
        sc.fusion_score = 1.0 / (k_rrf + sc.dense_rank) + 1.0 / (k_rrf + sc.sparse_rank);
        fused.push_back(std::move(sc));
    }
    std::sort(fused.begin(), fused.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        return a.fusion_score != b.fusion_score ? a.fusion_score > b.fusion_score
                                                : a.chunk_id < b.chunk_id;
    });
    return fused;
}

std::vector<float> expand_query(std::span<const float> q_vec, const ChunkStore& store,
                                std::size_t m) {
    if (m < 1) throw ValidationError("expand_query: m must be >= 1");
    if (store.empty()) throw ValidationError("expand_query: empty store");
    m = std::min(m, store.size());

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        scored.emplace_back(cosine(q_vec, store.at(i).embedding), i);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first
                                  : store.at(a.second).id < store.at(b.second).id;
    });

    std::vector<float> mean(q_vec.begin(), q_vec.end());
    for (std::size_t i = 0; i < m; ++i) {
        kernels::add_into(mean.data(), store.at(scored[i].second).embedding.data(), mean.size());
    }
    kernels::scale(mean.data(), mean.size(), 1.0f / static_cast<float>(m + 1));
    normalize_or_e0(mean);
    return mean;
}

std::vector<ScoredChunk> retrieve(const ChunkStore& store, const SparseIndex& index,
                                  std::string_view query_text, std::span<const float> q_vec,
                                  const RetrievalParams& params) {
    if (params.n < 1) throw ValidationError("retrieve: n must be >= 1");
    if (store.empty()) return {};

    std::vector<float> expanded =
        expand_query(q_vec, store, static_cast<std::size_t>(std::max(1, params.expand_m)));
    auto fused = rrf_fuse(dense_ranking(store, expanded),
                          sparse_ranking(store, index, query_text), params.k_rrf);
    if (fused.size() > static_cast<std::size_t>(params.n)) {
        fused.resize(static_cast<std::size_t>(params.n));
    }
    for (ScoredChunk& sc : fused) {
        sc.dense_sim = cosine(expanded, store.find(sc.chunk_id)->embedding);
    }
    return fused;
}

} // namespace ragopt
