#include "ragopt/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ragopt/errors.hpp"
#include "ragopt/nli.hpp"

namespace ragopt {

using nlohmann::json;

namespace {

std::vector<Proposal> checked_propose(const PolicyOracle& policy, const PlannerState& state,
                                      int k) {
    std::vector<Proposal> proposals = policy.propose(state, k);
    if (static_cast<int>(proposals.size()) != k) {
        std::ostringstream os;
        os << "policy oracle returned " << proposals.size() << " proposals, expected " << k;
        throw OracleError(OracleErrorKind::InvariantViolation, os.str());
    }
    for (const Proposal& p : proposals) {
        if (p.text.empty()) {
            throw OracleError(OracleErrorKind::InvariantViolation,
                              "policy oracle proposed an empty payload");
        }
    }
    return proposals;
}

void append_answer(std::string& answer, const std::string& text) {
    if (!answer.empty()) answer += ' ';
    answer += text;
}

// Retrieval query for an Augment action: the original query plus the last
// generated sentence, when one exists.
std::string augment_payload(const PlannerState& state) {
    std::vector<std::string> sentences = split_sentences(state.partial_answer);
    if (sentences.empty()) return state.query;
    return state.query + " " + sentences.back();
}

} // namespace

ScriptedPolicy ScriptedPolicy::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open policy fixture: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_jsonl(buffer.str());
}

ScriptedPolicy ScriptedPolicy::from_jsonl(const std::string& text) {
    ScriptedPolicy policy;
    std::istringstream in(text);
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
            os << "policy fixture line " << line_no << ": " << e.what();
            throw ParseError(os.str());
        }
        std::vector<Proposal> proposals;
        for (const json& p : rec.at("proposals")) {
            Proposal prop;
            prop.text = p.at("text").get<std::string>();
            prop.prior = p.at("prior").get<double>();
            prop.terminal = p.value("terminal", false);
            proposals.push_back(std::move(prop));
        }
        policy.add(rec.at("state_key").get<std::string>(), std::move(proposals));
    }
    return policy;
}

void ScriptedPolicy::add(const std::string& state_key, std::vector<Proposal> proposals) {
    table_[state_key] = std::move(proposals);
}

std::vector<Proposal> ScriptedPolicy::propose(const PlannerState& state, int k) const {
    auto it = table_.find(state.partial_answer);
    if (it == table_.end()) {
        throw OracleError(OracleErrorKind::Unavailable,
                          "no scripted proposals for state \"" + state.partial_answer + "\"");
    }
    if (static_cast<int>(it->second.size()) < k) {
        std::ostringstream os;
        os << "scripted state \"" << state.partial_answer << "\" has " << it->second.size()
           << " proposals, need " << k;
        throw OracleError(OracleErrorKind::Malformed, os.str());
    }
    std::vector<Proposal> taken(it->second.begin(), it->second.begin() + k);
    double sum = 0.0;
    for (const Proposal& p : taken) sum += p.prior;
    for (Proposal& p : taken) {
        p.prior = sum > 0.0 ? p.prior / sum : 1.0 / static_cast<double>(k);
    }
    return taken;
}

MctsNode* select_child(MctsNode& node, double c_puct) {
    if (node.children.empty()) {
        throw ValidationError("select_child: node has no children");
    }
    MctsNode* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    const double sqrt_parent = std::sqrt(static_cast<double>(node.visits));
    for (const auto& child : node.children) {
        double score =
            child->q + c_puct * child->prior * sqrt_parent / (1.0 + child->visits);
        if (score > best_score) {
            best_score = score;
            best = child.get();
        }
    }
    return best;
}

void expand(MctsNode& node, const PolicyOracle& policy, int k, int m, int max_depth,
            const AugmentFn& augment) {
    if (node.terminal) throw ValidationError("expand: node is terminal");
    if (!node.children.empty()) throw ValidationError("expand: node already expanded");
    if (node.state.depth >= max_depth) throw ValidationError("expand: node at max depth");
    if (k < 1) throw ValidationError("expand: k must be >= 1");

    std::vector<Proposal> proposals = checked_propose(policy, node.state, k);
    double prior_sum = 0.0;
    for (const Proposal& p : proposals) prior_sum += p.prior;

    for (const Proposal& p : proposals) {
        auto child = std::make_unique<MctsNode>();
        child->state = node.state;
        child->state.depth = node.state.depth + 1;
        append_answer(child->state.partial_answer, p.text);
        child->action_taken = PlannerAction{ActionKind::Generate, p.text};
        child->prior = p.prior;
        child->terminal = p.terminal || child->state.depth >= max_depth;
        child->parent = &node;
        node.children.push_back(std::move(child));
    }

    if (m > 0 && augment) {
        const std::string payload = augment_payload(node.state);
        const double mean_prior = prior_sum / static_cast<double>(proposals.size());
        std::vector<std::set<std::string>> deltas = augment(node.state, payload, m);
        if (static_cast<int>(deltas.size()) > m) deltas.resize(m);
        for (const std::set<std::string>& delta : deltas) {
            auto child = std::make_unique<MctsNode>();
            child->state = node.state;
            child->state.depth = node.state.depth + 1;
            child->state.context_ids.insert(delta.begin(), delta.end());
            child->action_taken = PlannerAction{ActionKind::Augment, payload};
            child->prior = mean_prior;
            child->terminal = child->state.depth >= max_depth;
            child->parent = &node;
            node.children.push_back(std::move(child));
        }
    }
}

double rollout(const MctsNode& node, const PolicyOracle& policy, const RewardFn& reward,
               int max_depth) {
    PlannerState state = node.state;
    bool terminal = node.terminal;
    while (!terminal && state.depth < max_depth) {
        Proposal top = checked_propose(policy, state, 1)[0];
        append_answer(state.partial_answer, top.text);
        state.depth += 1;
        terminal = top.terminal;
    }
    return reward(state.partial_answer, node.state.context_ids);
}

void backpropagate(const std::vector<MctsNode*>& path, double reward) {
    for (MctsNode* node : path) {
        node->q = (node->visits * node->q + reward) / (node->visits + 1);
        node->visits += 1;
    }
}

SearchResult search(const PlannerState& root_state, const PolicyOracle& policy,
                    const RewardFn& reward, const SearchConfig& config,
                    const AugmentFn& augment) {
    if (config.n_sim < 1) throw ValidationError("search: n_sim must be >= 1");
    if (config.k < 1) throw ValidationError("search: k must be >= 1");
    if (config.max_depth < 1) throw ValidationError("search: max_depth must be >= 1");

    SearchResult result;
    result.root = std::make_unique<MctsNode>();
    result.root->state = root_state;
    result.root->visits = 1; // root initialization
    result.root->terminal = root_state.depth >= config.max_depth;
    int next_id = 1;

    for (int sim = 0; sim < config.n_sim; ++sim) {
        std::vector<MctsNode*> path{result.root.get()};
        MctsNode* cur = result.root.get();
        while (!cur->children.empty()) {
            cur = select_child(*cur, config.c_puct);
            path.push_back(cur);
        }
        if (!cur->terminal && cur->state.depth < config.max_depth) {
            expand(*cur, policy, config.k, augment ? config.m : 0, config.max_depth, augment);
            for (auto& child : cur->children) child->id = next_id++;
            if (config.uniform_priors) {
                for (auto& child : cur->children) {
                    child->prior = 1.0 / static_cast<double>(cur->children.size());
                }
            }
            cur = select_child(*cur, config.c_puct);
            path.push_back(cur);
        }
        double r = rollout(*cur, policy, reward, config.max_depth);
        backpropagate(path, r);
        if (config.record_trace) {
            SimulationTrace t;
            t.reward = r;
            for (MctsNode* node : path) t.node_ids.push_back(node->id);
            result.trace.push_back(std::move(t));
        }
    }

    // Robust-child walk: visits, then Q, then child index.
    MctsNode* cur = result.root.get();
    while (!cur->children.empty()) {
        MctsNode* best = cur->children.front().get();
        for (const auto& child : cur->children) {
            if (child->visits > best->visits ||
                (child->visits == best->visits && child->q > best->q)) {
                best = child.get();
            }
        }
        cur = best;
    }
    PlannerState state = cur->state;
    bool terminal = cur->terminal;
    while (!terminal && state.depth < config.max_depth) {
        Proposal top = checked_propose(policy, state, 1)[0];
        append_answer(state.partial_answer, top.text);
        state.depth += 1;
        terminal = top.terminal;
    }
    result.answer = state.partial_answer;
    return result;
}

json tree_stats(const MctsNode& root) {
    json nodes = json::array();
    std::vector<const MctsNode*> queue{&root};
    while (!queue.empty()) {
        const MctsNode* node = queue.front();
        queue.erase(queue.begin());
        json rec;
        rec["id"] = node->id;
        rec["visits"] = node->visits;
        rec["q"] = node->q;
        rec["prior"] = node->prior;
        rec["terminal"] = node->terminal;
        rec["depth"] = node->state.depth;
        if (node->action_taken) {
            rec["action"] =
                node->action_taken->kind == ActionKind::Generate ? "generate" : "augment";
            rec["payload"] = node->action_taken->payload;
        }
        json child_ids = json::array();
        for (const auto& child : node->children) {
            child_ids.push_back(child->id);
            queue.push_back(child.get());
        }
        rec["children"] = std::move(child_ids);
        nodes.push_back(std::move(rec));
    }
    return json{{"nodes", std::move(nodes)}};
}

} // namespace ragopt
