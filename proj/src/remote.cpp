#include "ragopt/remote.hpp"

#include <cmath>
#include <sstream>

#include <httplib.h>

#include "ragopt/errors.hpp"

namespace ragopt {

using nlohmann::json;

RemoteClient::RemoteClient(std::string url, int timeout_ms)
    : url_(std::move(url)), timeout_ms_(timeout_ms) {
    std::string rest = url_;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
    std::size_t slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = authority.find(':');
    if (colon == std::string::npos) {
        host_ = authority;
    } else {
        host_ = authority.substr(0, colon);
        port_ = std::stoi(authority.substr(colon + 1));
    }
    if (host_.empty()) {
        throw ValidationError("remote oracle url has no host: " + url_);
    }
}

json RemoteClient::post(const json& request) const {
    const std::string body = request.dump();
    httplib::Error last_error = httplib::Error::Success;

    for (int attempt = 0; attempt < 2; ++attempt) { // one retry
        httplib::Client client(host_, port_);
        client.set_connection_timeout(0, timeout_ms_ * 1000);
        client.set_read_timeout(0, timeout_ms_ * 1000);
        client.set_write_timeout(0, timeout_ms_ * 1000);

        httplib::Result res = client.Post(path_, body, "application/json");
        if (!res) {
            last_error = res.error();
            continue;
        }
        if (res->status != 200) {
            std::ostringstream os;
            os << url_ << " returned status " << res->status;
            throw OracleError(OracleErrorKind::Unavailable, os.str());
        }
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw OracleError(OracleErrorKind::Malformed,
                              url_ + " returned unparseable body: " + e.what());
        }
    }

    if (last_error == httplib::Error::ConnectionTimeout ||
        last_error == httplib::Error::Read || last_error == httplib::Error::Write) {
        throw OracleError(OracleErrorKind::Timeout,
                          url_ + " timed out after retry (" + std::to_string(timeout_ms_) +
                              " ms)");
    }
    throw OracleError(OracleErrorKind::Unavailable,
                      url_ + " unreachable: " + httplib::to_string(last_error));
}

RemoteVerifier::RemoteVerifier(std::string url, int timeout_ms)
    : client_(std::move(url), timeout_ms) {}

NliVerdict RemoteVerifier::verdict(const std::string& premise,
                                   const std::string& hypothesis) const {
    json response = client_.post({{"premise", premise}, {"hypothesis", hypothesis}});
    if (!response.is_object() || !response.contains("entail") ||
        !response.contains("neutral") || !response.contains("contradict")) {
        throw OracleError(OracleErrorKind::Malformed,
                          client_.url() + ": verifier response missing probability fields");
    }
    NliVerdict v;
    v.p_ent = response["entail"].get<double>();
    v.p_neu = response["neutral"].get<double>();
    v.p_con = response["contradict"].get<double>();
    if (v.p_ent < 0 || v.p_neu < 0 || v.p_con < 0 ||
        std::abs(v.p_ent + v.p_neu + v.p_con - 1.0) > 1e-6) {
        std::ostringstream os;
        os << client_.url() << ": verifier probabilities (" << v.p_ent << ", " << v.p_neu
           << ", " << v.p_con << ") do not sum to 1";
        throw OracleError(OracleErrorKind::InvariantViolation, os.str());
    }
    return v;
}

RemoteEmbedder::RemoteEmbedder(std::string url, int timeout_ms)
    : client_(std::move(url), timeout_ms) {}

std::vector<float> RemoteEmbedder::embed(const std::string& text,
                                         std::size_t expected_dim) const {
    json response = client_.post({{"text", text}});
    if (!response.is_object() || !response.contains("embedding") ||
        !response["embedding"].is_array()) {
        throw OracleError(OracleErrorKind::Malformed,
                          client_.url() + ": embedder response missing embedding array");
    }
    std::vector<float> embedding = response["embedding"].get<std::vector<float>>();
    if (embedding.size() != expected_dim) {
        std::ostringstream os;
        os << client_.url() << ": embedding dimension " << embedding.size() << ", expected "
           << expected_dim;
        throw OracleError(OracleErrorKind::InvariantViolation, os.str());
    }
    return embedding;
}

RemoteGenerator::RemoteGenerator(std::string url, int timeout_ms)
    : client_(std::move(url), timeout_ms) {}

std::vector<Proposal> RemoteGenerator::propose(const PlannerState& state, int k) const {
    json state_json{{"query", state.query},
                    {"context_ids", state.context_ids},
                    {"partial_answer", state.partial_answer},
                    {"depth", state.depth}};
    json response = client_.post({{"state", std::move(state_json)}, {"k", k}});
    if (!response.is_object() || !response.contains("proposals") ||
        !response["proposals"].is_array()) {
        throw OracleError(OracleErrorKind::Malformed,
                          client_.url() + ": generator response missing proposals array");
    }
    std::vector<Proposal> proposals;
    for (const json& p : response["proposals"]) {
        Proposal prop;
        prop.text = p.at("text").get<std::string>();
        prop.prior = p.at("prior").get<double>();
        prop.terminal = p.value("terminal", false);
        proposals.push_back(std::move(prop));
    }
    if (static_cast<int>(proposals.size()) != k) {
        std::ostringstream os;
        os << client_.url() << ": generator returned " << proposals.size()
           << " proposals, expected " << k;
        throw OracleError(OracleErrorKind::InvariantViolation, os.str());
    }
    return proposals;
}

} // namespace ragopt
