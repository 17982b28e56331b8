#include "ragopt/synth.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ragopt/errors.hpp"

namespace ragopt {

using nlohmann::json;

namespace {

Chunk make_chunk(std::string id, std::string text, std::int64_t token_len) {
    Chunk c;
    c.id = std::move(id);
    c.text = std::move(text);
    c.token_len = token_len;
    return c;
}

} // namespace

SynthDataset make_synth_dataset(const SynthParams& params) {
    SynthDataset data;

    // Entity names are unique per query so topical chunks never cross-match.
    for (int i = 0; i < params.n_queries; ++i) {
        const std::string qi = std::to_string(i);
        const std::string entity_a = "veridium" + qi;
        const std::string entity_b = "oblique" + qi;
        const std::string qid = "q" + qi;

        const std::string query_text = "when was " + entity_a + " founded and where was " +
                                       entity_a + " built and when was " + entity_b +
                                       " established";

        const std::string fact_a = entity_a + " was founded in 1901 and " + entity_a +
                                   " was built in the north quarter";
        const std::string dup1 = entity_a + " was founded in yesteryear and " + entity_a +
                                 " was built in the north quarter";
        const std::string dup2 = entity_a + " was founded in antiquity and " + entity_a +
                                 " was built in the north quarter";
        const std::string fact_b =
            entity_b + " was established in 1955 after the great exhibition";

        data.chunks.push_back(make_chunk(qid + "_dup0", fact_a, params.dup_tokens));
        data.chunks.push_back(make_chunk(qid + "_dup1", dup1, params.dup_tokens));
        data.chunks.push_back(make_chunk(qid + "_dup2", dup2, params.dup_tokens));
        data.chunks.push_back(make_chunk(qid + "_gold", fact_b, params.gold_tokens));

        QueryRecord query;
        query.id = qid;
        query.text = query_text;
        query.gold_answers = {fact_a, fact_b};
        query.gold_passage_ids = {qid + "_dup0", qid + "_gold"};
        data.queries.push_back(std::move(query));
    }

    for (int t = 0; t < params.n_fillers; ++t) {
        const std::string ti = std::to_string(t);
        data.chunks.push_back(make_chunk(
            "filler" + ti,
            "meadow" + ti + " brook" + ti + " carries quiet water past the stone" + ti +
                " mill and the old orchard" + ti,
            params.filler_tokens));
    }
    return data;
}

void write_synth_dataset(const SynthDataset& dataset,
                         const std::filesystem::path& corpus_path,
                         const std::filesystem::path& queries_path) {
    std::ofstream corpus(corpus_path);
    if (!corpus) {
        throw ValidationError("cannot write corpus file: " + corpus_path.string());
    }
    for (const Chunk& c : dataset.chunks) {
        corpus << json{{"id", c.id}, {"text", c.text}, {"token_len", c.token_len}}.dump()
               << "\n";
    }

    std::ofstream queries(queries_path);
    if (!queries) {
        throw ValidationError("cannot write queries file: " + queries_path.string());
    }
    for (const QueryRecord& q : dataset.queries) {
        queries << json{{"id", q.id},
                        {"text", q.text},
                        {"gold_answers", q.gold_answers},
                        {"gold_passage_ids", q.gold_passage_ids}}
                       .dump()
                << "\n";
    }
}

} // namespace ragopt
