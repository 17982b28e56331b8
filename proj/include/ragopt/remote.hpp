#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragopt/mcts.hpp"
#include "ragopt/nli.hpp"

namespace ragopt {

// One request/response POST with a timeout and a single retry on transport
// failure. Response invariants (probability sums, vector dimensions, proposal
// counts) are validated before anything reaches the pipeline; violations are
// OracleError, with the kind distinguishing timeout / malformed / invariant.
class RemoteClient {
public:
    RemoteClient(std::string url, int timeout_ms);

    nlohmann::json post(const nlohmann::json& request) const;
    const std::string& url() const { return url_; }

private:
    std::string url_;
    std::string host_;
    int port_ = 80;
    std::string path_ = "/";
    int timeout_ms_ = 2000;
};

// POST {"premise", "hypothesis"} -> {"entail", "neutral", "contradict"}.
class RemoteVerifier : public NliOracle {
public:
    RemoteVerifier(std::string url, int timeout_ms);
    NliVerdict verdict(const std::string& premise,
                       const std::string& hypothesis) const override;

private:
    RemoteClient client_;
};

// POST {"text"} -> {"embedding": [float]}.
class RemoteEmbedder {
public:
    RemoteEmbedder(std::string url, int timeout_ms);
    std::vector<float> embed(const std::string& text, std::size_t expected_dim) const;

private:
    RemoteClient client_;
};

// POST {"state": {...}, "k"} -> {"proposals": [{"text", "prior", "terminal"}]}.
class RemoteGenerator : public PolicyOracle {
public:
    RemoteGenerator(std::string url, int timeout_ms);
    std::vector<Proposal> propose(const PlannerState& state, int k) const override;

private:
    RemoteClient client_;
};

} // namespace ragopt
