#include "ragopt/corpus.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ragopt/errors.hpp"
#include "ragopt/kernels.hpp"

namespace ragopt {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::int64_t count_tokens(std::string_view text) {
    std::int64_t count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::vector<std::string> lowercase_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!cur.empty()) {
                tokens.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

void normalize_or_e0(std::vector<float>& v) {
    float nsq = kernels::norm_sq(v.data(), v.size());
    if (nsq <= 0.0f) {
        if (!v.empty()) v[0] = 1.0f;
        return;
    }
    kernels::scale(v.data(), v.size(), 1.0f / std::sqrt(nsq));
}

std::vector<float> hash_embed(std::string_view text, std::size_t dim) {
    if (dim < 2) throw ValidationError("hash_embed requires dim >= 2");
    std::vector<float> v(dim, 0.0f);
    for (const std::string& tok : lowercase_tokens(text)) {
        v[fnv1a64(tok) % dim] += 1.0f;
    }
    normalize_or_e0(v);
    return v;
}

const Chunk* ChunkStore::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &chunks_[it->second];
}

void ChunkStore::add(Chunk chunk) {
    if (index_.count(chunk.id)) {
        throw ValidationError("duplicate chunk id: \"" + chunk.id + "\"");
    }
    if (chunk.embedding.size() != dim_) {
        std::ostringstream os;
        os << "chunk \"" << chunk.id << "\": embedding dimension " << chunk.embedding.size()
           << " != store dimension " << dim_;
        throw ValidationError(os.str());
    }
    if (chunk.token_len < 0) {
        throw ValidationError("chunk \"" + chunk.id + "\": negative token_len");
    }
    normalize_or_e0(chunk.embedding);
    index_.emplace(chunk.id, chunks_.size());
    chunks_.push_back(std::move(chunk));
}

ChunkStore load_corpus(const std::filesystem::path& path, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open corpus file: " + path.string());

    ChunkStore store(dim);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": malformed chunk record: " << e.what();
            throw ParseError(os.str());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("text") ||
            !rec["id"].is_string() || !rec["text"].is_string()) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": chunk record needs string fields id, text";
            throw ParseError(os.str());
        }

        Chunk chunk;
        chunk.id = rec["id"].get<std::string>();
        chunk.text = rec["text"].get<std::string>();
        if (rec.contains("token_len") && !rec["token_len"].is_null()) {
            if (!rec["token_len"].is_number_integer()) {
                std::ostringstream os;
                os << path.string() << ":" << line_no << ": token_len must be an integer";
                throw ParseError(os.str());
            }
            chunk.token_len = rec["token_len"].get<std::int64_t>();
        } else {
            chunk.token_len = count_tokens(chunk.text);
        }
        if (rec.contains("embedding") && !rec["embedding"].is_null()) {
            if (!rec["embedding"].is_array()) {
                std::ostringstream os;
                os << path.string() << ":" << line_no << ": embedding must be an array of numbers";
                throw ParseError(os.str());
            }
            chunk.embedding = rec["embedding"].get<std::vector<float>>();
        } else {
            chunk.embedding = hash_embed(chunk.text, dim);
        }
        store.add(std::move(chunk));
    }
    return store;
}

void save_corpus(const ChunkStore& store, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open corpus file for writing: " + path.string());
    for (const Chunk& c : store.chunks()) {
        json rec;
        rec["id"] = c.id;
        rec["text"] = c.text;
        rec["token_len"] = c.token_len;
        rec["embedding"] = c.embedding;
        out << rec.dump() << "\n";
    }
}

std::vector<QueryRecord> load_queries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open query file: " + path.string());

    std::vector<QueryRecord> queries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": malformed query record: " << e.what();
            throw ParseError(os.str());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("text")) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": query record needs id, text";
            throw ParseError(os.str());
        }
        QueryRecord q;
        q.id = rec["id"].get<std::string>();
        q.text = rec["text"].get<std::string>();
        if (rec.contains("gold_answers")) {
            q.gold_answers = rec["gold_answers"].get<std::vector<std::string>>();
        }
        if (rec.contains("gold_passage_ids")) {
            q.gold_passage_ids = rec["gold_passage_ids"].get<std::vector<std::string>>();
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

} // namespace ragopt
