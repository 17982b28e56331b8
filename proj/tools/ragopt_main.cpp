#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ragopt/config.hpp"
#include "ragopt/errors.hpp"
#include "ragopt/eval.hpp"
#include "ragopt/mmkp.hpp"
#include "ragopt/synth.hpp"

namespace {

using namespace ragopt;

int run_eval_command(const std::string& config_path, const std::string& corpus_path,
                     const std::string& queries_path, bool mock, bool remote,
                     std::uint64_t seed, const std::string& report_path,
                     const CLI::App& cmd, PipelineConfig config) {
    if (mock) config.oracles.mode = "mock";
    if (remote) config.oracles.mode = "remote";
    (void)config_path;
    validate_config(config);

    EvalOptions options;
    options.seed = seed;

    auto start = std::chrono::steady_clock::now();
    EvalReport report = run_eval(config, corpus_path, queries_path, options);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    std::cout << report_summary(report);
    std::cout << "wall time: " << elapsed << " ms\n";
    (void)cmd;

    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw ValidationError("cannot write report: " + report_path);
        out << report_to_json(report, config, options).dump(2) << "\n";
        std::cout << "report written to " << report_path << "\n";
    }
    if (failure_budget_exceeded(report)) {
        std::cerr << "oracle failure budget exceeded: " << report.counters.failed << "/"
                  << report.counters.queries << " queries failed\n";
        return 3;
    }
    return 0;
}

int run_solve_mmkp(const std::string& instance_path) {
    std::ifstream in(instance_path);
    if (!in) throw ValidationError("cannot open instance file: " + instance_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("instance file: ") + e.what());
    }
    MmkpInstance instance = instance_from_json(j);
    MmkpSolution solution = solve_pareto_dp(instance);
    std::cout << solution_to_json(solution).dump(2) << "\n";
    return 0;
}

int run_bench_solvers(int n_instances, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int agree = 0;
    double exact_ms = 0.0;
    double dp_ms = 0.0;
    for (int i = 0; i < n_instances; ++i) {
        MmkpInstance instance = random_instance(rng);

        auto t0 = std::chrono::steady_clock::now();
        MmkpSolution exact = solve_exact(instance);
        auto t1 = std::chrono::steady_clock::now();
        MmkpSolution dp = solve_pareto_dp(instance);
        auto t2 = std::chrono::steady_clock::now();

        exact_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
        dp_ms += std::chrono::duration<double, std::milli>(t2 - t1).count();
        if (exact.total_value == dp.total_value) ++agree;
    }
    std::cout << "instances: " << n_instances << "\n";
    std::cout << "value agreement: " << agree << "/" << n_instances << "\n";
    std::cout << "exact solver total: " << exact_ms << " ms\n";
    std::cout << "pareto dp total:   " << dp_ms << " ms\n";
    return agree == n_instances ? 0 : 2;
}

int run_make_synth(const std::string& out_dir, int n_queries) {
    SynthParams params;
    params.n_queries = n_queries;
    SynthDataset dataset = make_synth_dataset(params);
    std::filesystem::create_directories(out_dir);
    std::filesystem::path corpus = std::filesystem::path(out_dir) / "corpus.jsonl";
    std::filesystem::path queries = std::filesystem::path(out_dir) / "queries.jsonl";
    write_synth_dataset(dataset, corpus, queries);
    std::cout << "wrote " << dataset.chunks.size() << " chunks to " << corpus.string()
              << "\n";
    std::cout << "wrote " << dataset.queries.size() << " queries to " << queries.string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budgeted context selection (MMKP) and NLI-reward tree search "
                 "for retrieval-augmented answering"};
    app.require_subcommand(1);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run the evaluation pipeline over a dataset");
    std::string config_path;
    std::string corpus_path;
    std::string queries_path;
    std::string report_path;
    std::uint64_t seed = 0;
    bool mock = false;
    bool remote = false;
    eval_cmd->add_option("--config", config_path, "Pipeline config file (key = value lines)");
    eval_cmd->add_option("--corpus", corpus_path, "Corpus JSONL file")->required();
    eval_cmd->add_option("--queries", queries_path, "Queries JSONL file")->required();
    eval_cmd->add_flag("--mock", mock, "Force mock oracles");
    eval_cmd->add_flag("--remote", remote, "Force remote oracles");
    eval_cmd->add_option("--seed", seed, "Deterministic run seed");
    eval_cmd->add_option("--report", report_path, "Write the JSON report to this path");
    double c_red = -1.0, alpha = -1.0, beta = -1.0, tau = -1.0, lambda_red = -1.0;
    std::int64_t c_token = -1;
    eval_cmd->add_option("--c-token", c_token, "Token budget (default 1500)");
    eval_cmd->add_option("--c-red", c_red, "Redundancy budget (default 120)");
    eval_cmd->add_option("--alpha", alpha, "Relevance weight (default 0.7)");
    eval_cmd->add_option("--beta", beta, "Diversity weight (default 0.3)");
    eval_cmd->add_option("--tau", tau, "Grouping similarity threshold (default 0.82)");
    eval_cmd->add_option("--lambda-red", lambda_red, "Redundancy cost scale (default 100)");
    std::string selector;
    eval_cmd->add_option("--selector", selector, "Context selector: mmkp | topk");

    // solve-mmkp
    auto* solve_cmd = app.add_subcommand("solve-mmkp", "Solve an MMKP instance file");
    std::string instance_path;
    solve_cmd->add_option("--instance", instance_path, "Instance JSON file")->required();

    // bench-solvers
    auto* bench_cmd =
        app.add_subcommand("bench-solvers", "Compare exact and Pareto DP solvers");
    int bench_n = 100;
    std::uint64_t bench_seed = 1;
    bench_cmd->add_option("--n", bench_n, "Number of random instances");
    bench_cmd->add_option("--seed", bench_seed, "Generator seed");

    // make-synth
    auto* synth_cmd =
        app.add_subcommand("make-synth", "Write the bundled synthetic trap dataset");
    std::string out_dir = "data";
    int synth_queries = 20;
    synth_cmd->add_option("--out", out_dir, "Output directory");
    synth_cmd->add_option("--queries", synth_queries, "Number of trap queries");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval_cmd->parsed()) {
            PipelineConfig config;
            if (!config_path.empty()) config = load_config(config_path);
            if (c_token >= 0) config.mmkp.c_token = c_token;
            if (c_red >= 0) config.mmkp.c_red = c_red;
            if (alpha >= 0) config.mmkp.alpha = alpha;
            if (beta >= 0) config.mmkp.beta = beta;
            if (tau >= 0) config.mmkp.tau = tau;
            if (lambda_red >= 0) config.mmkp.lambda_red = lambda_red;
            if (!selector.empty()) config.mmkp.selector = selector;
            return run_eval_command(config_path, corpus_path, queries_path, mock, remote,
                                    seed, report_path, *eval_cmd, std::move(config));
        }
        if (solve_cmd->parsed()) return run_solve_mmkp(instance_path);
        if (bench_cmd->parsed()) return run_bench_solvers(bench_n, bench_seed);
        if (synth_cmd->parsed()) return run_make_synth(out_dir, synth_queries);
    } catch (const OracleError& e) {
        std::cerr << "oracle error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
