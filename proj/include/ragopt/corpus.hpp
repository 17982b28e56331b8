#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ragopt {

// A retrievable passage. Embeddings are unit-norm vectors of the store-wide
// dimension; token_len counts whitespace-delimited words.
struct Chunk {
    std::string id;
    std::string text;
    std::int64_t token_len = 0;
    std::vector<float> embedding;
    std::unordered_map<std::string, double> terms; // filled by sparse indexing
};

struct QueryRecord {
    std::string id;
    std::string text;
    std::vector<std::string> gold_answers;
    std::vector<std::string> gold_passage_ids;
};

// Immutable after load; safe for concurrent reads.
class ChunkStore {
public:
    ChunkStore() = default;
    explicit ChunkStore(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return chunks_.size(); }
    bool empty() const { return chunks_.empty(); }

    const Chunk& at(std::size_t i) const { return chunks_[i]; }
    const std::vector<Chunk>& chunks() const { return chunks_; }

    // nullptr when the id is unknown.
    const Chunk* find(std::string_view id) const;

    // Validates id uniqueness and embedding dimension; normalizes the
    // embedding in place (zero vector maps to e0 so cosine stays defined).
    void add(Chunk chunk);

private:
    std::size_t dim_ = 0;
    std::vector<Chunk> chunks_;
    std::unordered_map<std::string, std::size_t> index_;
};

// FNV-1a 64-bit over the bytes as given. Callers hash lowercased tokens.
std::uint64_t fnv1a64(std::string_view bytes);

// Number of maximal whitespace-delimited substrings.
std::int64_t count_tokens(std::string_view text);

// Lowercased whitespace tokens of `text`.
std::vector<std::string> lowercase_tokens(std::string_view text);

// Deterministic bag-of-words embedding: each lowercase token adds +1 at
// fnv1a64(token) mod dim, then L2-normalize. Empty text maps to e0.
// Requires dim >= 2.
std::vector<float> hash_embed(std::string_view text, std::size_t dim);

// In-place L2 normalization; an all-zero vector becomes e0.
void normalize_or_e0(std::vector<float>& v);

// Corpus file: UTF-8 JSON lines {"id", "text", "embedding"?, "token_len"?}.
ChunkStore load_corpus(const std::filesystem::path& path, std::size_t dim);
void save_corpus(const ChunkStore& store, const std::filesystem::path& path);

// Query file: JSON lines {"id", "text", "gold_answers", "gold_passage_ids"}.
std::vector<QueryRecord> load_queries(const std::filesystem::path& path);

} // namespace ragopt
