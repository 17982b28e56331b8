#include "ragopt/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ragopt/errors.hpp"

namespace ragopt {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T parsed{};
    in >> parsed;
    if (in.fail() || !(in >> std::ws).eof()) {
        throw ValidationError("config key " + key + ": cannot parse value \"" + value + "\"");
    }
    return parsed;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig config;
    std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters;

    auto set_int = [&](int& slot) {
        return [&slot](const std::string& k, const std::string& v) {
            slot = parse_number<int>(k, v);
        };
    };
    auto set_i64 = [&](std::int64_t& slot) {
        return [&slot](const std::string& k, const std::string& v) {
            slot = parse_number<std::int64_t>(k, v);
        };
    };
    auto set_double = [&](double& slot) {
        return [&slot](const std::string& k, const std::string& v) {
            slot = parse_number<double>(k, v);
        };
    };
    auto set_string = [&](std::string& slot) {
        return [&slot](const std::string&, const std::string& v) { slot = v; };
    };

    setters["retrieval.dim"] = set_int(config.retrieval.dim);
    setters["retrieval.n"] = set_int(config.retrieval.n);
    setters["retrieval.k_rrf"] = set_int(config.retrieval.k_rrf);
    setters["retrieval.expand_m"] = set_int(config.retrieval.expand_m);
    setters["retrieval.max_features"] = set_int(config.retrieval.max_features);
    setters["mmkp.selector"] = set_string(config.mmkp.selector);
    setters["mmkp.c_token"] = set_i64(config.mmkp.c_token);
    setters["mmkp.c_red"] = set_double(config.mmkp.c_red);
    setters["mmkp.alpha"] = set_double(config.mmkp.alpha);
    setters["mmkp.beta"] = set_double(config.mmkp.beta);
    setters["mmkp.tau"] = set_double(config.mmkp.tau);
    setters["mmkp.lambda_red"] = set_double(config.mmkp.lambda_red);
    setters["mcts.n_sim"] = set_int(config.mcts.n_sim);
    setters["mcts.k"] = set_int(config.mcts.k);
    setters["mcts.max_depth"] = set_int(config.mcts.max_depth);
    setters["mcts.c_puct"] = set_double(config.mcts.c_puct);
    setters["reward.w_ent"] = set_double(config.reward.w_ent);
    setters["reward.w_neu"] = set_double(config.reward.w_neu);
    setters["reward.w_con"] = set_double(config.reward.w_con);
    setters["oracles.mode"] = set_string(config.oracles.mode);
    setters["oracles.embedder_url"] = set_string(config.oracles.embedder_url);
    setters["oracles.generator_url"] = set_string(config.oracles.generator_url);
    setters["oracles.verifier_url"] = set_string(config.oracles.verifier_url);
    setters["oracles.timeout_ms"] = set_int(config.oracles.timeout_ms);

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << line_no << ": expected key = value";
            throw ParseError(os.str());
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end()) {
            throw ValidationError("unknown config key: " + key);
        }
        it->second(key, value);
    }
    validate_config(config);
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const PipelineConfig& c) {
    std::ostringstream os;
    os << "retrieval.dim = " << c.retrieval.dim << "\n";
    os << "retrieval.n = " << c.retrieval.n << "\n";
    os << "retrieval.k_rrf = " << c.retrieval.k_rrf << "\n";
    os << "retrieval.expand_m = " << c.retrieval.expand_m << "\n";
    os << "retrieval.max_features = " << c.retrieval.max_features << "\n";
    os << "mmkp.selector = " << c.mmkp.selector << "\n";
    os << "mmkp.c_token = " << c.mmkp.c_token << "\n";
    os << "mmkp.c_red = " << format_double(c.mmkp.c_red) << "\n";
    os << "mmkp.alpha = " << format_double(c.mmkp.alpha) << "\n";
    os << "mmkp.beta = " << format_double(c.mmkp.beta) << "\n";
    os << "mmkp.tau = " << format_double(c.mmkp.tau) << "\n";
    os << "mmkp.lambda_red = " << format_double(c.mmkp.lambda_red) << "\n";
    os << "mcts.n_sim = " << c.mcts.n_sim << "\n";
    os << "mcts.k = " << c.mcts.k << "\n";
    os << "mcts.max_depth = " << c.mcts.max_depth << "\n";
    os << "mcts.c_puct = " << format_double(c.mcts.c_puct) << "\n";
    os << "reward.w_ent = " << format_double(c.reward.w_ent) << "\n";
    os << "reward.w_neu = " << format_double(c.reward.w_neu) << "\n";
    os << "reward.w_con = " << format_double(c.reward.w_con) << "\n";
    os << "oracles.mode = " << c.oracles.mode << "\n";
    os << "oracles.embedder_url = " << c.oracles.embedder_url << "\n";
    os << "oracles.generator_url = " << c.oracles.generator_url << "\n";
    os << "oracles.verifier_url = " << c.oracles.verifier_url << "\n";
    os << "oracles.timeout_ms = " << c.oracles.timeout_ms << "\n";
    return os.str();
}

void validate_config(const PipelineConfig& c) {
    auto fail = [](const std::string& msg) { throw ValidationError("config: " + msg); };
    if (c.retrieval.dim < 2) fail("retrieval.dim must be >= 2");
    if (c.retrieval.n < 1) fail("retrieval.n must be >= 1");
    if (c.retrieval.k_rrf < 1) fail("retrieval.k_rrf must be >= 1");
    if (c.retrieval.expand_m < 1) fail("retrieval.expand_m must be >= 1");
    if (c.retrieval.max_features < 1) fail("retrieval.max_features must be >= 1");
    if (c.mmkp.selector != "mmkp" && c.mmkp.selector != "topk") {
        fail("mmkp.selector must be mmkp or topk");
    }
    if (c.mmkp.c_token < 0) fail("mmkp.c_token must be >= 0");
    if (c.mmkp.c_red < 0) fail("mmkp.c_red must be >= 0");
    if (c.mmkp.alpha < 0 || c.mmkp.beta < 0) fail("mmkp.alpha and mmkp.beta must be >= 0");
    if (!(c.mmkp.tau > 0.0 && c.mmkp.tau <= 1.0)) fail("mmkp.tau must be in (0, 1]");
    if (c.mmkp.lambda_red < 0) fail("mmkp.lambda_red must be >= 0");
    if (c.mcts.n_sim < 1) fail("mcts.n_sim must be >= 1");
    if (c.mcts.k < 1) fail("mcts.k must be >= 1");
    if (c.mcts.max_depth < 1) fail("mcts.max_depth must be >= 1");
    if (c.mcts.c_puct < 0) fail("mcts.c_puct must be >= 0");
    if (c.reward.w_con >= 0) fail("reward.w_con must be negative");
    if (c.oracles.mode != "mock" && c.oracles.mode != "remote") {
        fail("oracles.mode must be mock or remote");
    }
    if (c.oracles.timeout_ms < 1) fail("oracles.timeout_ms must be >= 1");
}

} // namespace ragopt
