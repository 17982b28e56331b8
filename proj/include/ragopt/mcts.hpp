#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace ragopt {

struct PlannerState {
    std::string query;
    std::set<std::string> context_ids;
    std::string partial_answer;
    int depth = 0;
};

enum class ActionKind { Generate, Augment };

struct PlannerAction {
    ActionKind kind = ActionKind::Generate;
    std::string payload; // continuation text / retrieval query text
};

struct Proposal {
    std::string text;
    double prior = 0.0;
    bool terminal = false;
};

// Stand-in for the generation policy. propose must return exactly k actions,
// be deterministic for a fixed seed, and give priors summing to 1.
class PolicyOracle {
public:
    virtual ~PolicyOracle() = default;
    virtual std::vector<Proposal> propose(const PlannerState& state, int k) const = 0;
};

// Fixture-driven policy. One JSON object per line:
//   {"state_key": str, "proposals": [{"text", "prior", "terminal"}]}
// States are keyed by their partial answer. Priors are renormalized over the
// first k proposals taken.
class ScriptedPolicy : public PolicyOracle {
public:
    static ScriptedPolicy from_file(const std::filesystem::path& path);
    static ScriptedPolicy from_jsonl(const std::string& text);

    void add(const std::string& state_key, std::vector<Proposal> proposals);
    std::vector<Proposal> propose(const PlannerState& state, int k) const override;

private:
    std::unordered_map<std::string, std::vector<Proposal>> table_;
};

struct MctsNode {
    int id = 0;
    PlannerState state;
    std::optional<PlannerAction> action_taken;
    double prior = 1.0;
    int visits = 0;
    double q = 0.0;
    bool terminal = false;
    MctsNode* parent = nullptr;
    std::vector<std::unique_ptr<MctsNode>> children;
};

// reward(answer, context ids) -> scalar reward of a completed answer.
using RewardFn =
    std::function<double(const std::string&, const std::set<std::string>&)>;

// augment(state, retrieval query, m) -> up to m context deltas, one per
// Augment child. Deterministic by contract.
using AugmentFn = std::function<std::vector<std::set<std::string>>(
    const PlannerState&, const std::string&, int)>;

struct SearchConfig {
    int n_sim = 24;
    int k = 3;
    int m = 1; // max Augment children per expansion (needs an AugmentFn)
    int max_depth = 3;
    double c_puct = 1.4;
    bool uniform_priors = false; // UCT-style behavior
    bool record_trace = false;
};

struct SimulationTrace {
    std::vector<int> node_ids; // root..leaf path of one simulation
    double reward = 0.0;
};

struct SearchResult {
    std::string answer;
    std::unique_ptr<MctsNode> root;
    std::vector<SimulationTrace> trace;
};

// argmax over children of Q + c_puct * P * sqrt(N(s)) / (1 + N(s,a)),
// ties by lowest child index. Throws when the node has no children.
MctsNode* select_child(MctsNode& node, double c_puct);

// Adds k Generate children plus up to m Augment children. Throws when the
// node is terminal, already expanded, or at max depth.
void expand(MctsNode& node, const PolicyOracle& policy, int k, int m, int max_depth,
            const AugmentFn& augment);

// Greedy completion with the policy's top proposal until terminal or the
// depth cap, then the reward of the full answer against the node's context.
double rollout(const MctsNode& node, const PolicyOracle& policy, const RewardFn& reward,
               int max_depth);

// Q <- (N*Q + R) / (N+1), then N <- N+1, for every node on the path.
void backpropagate(const std::vector<MctsNode*>& path, double reward);

// N_sim iterations of select / expand / rollout / backpropagate; the answer
// comes from the root child with the highest visit count (ties by higher Q,
// then index).
SearchResult search(const PlannerState& root_state, const PolicyOracle& policy,
                    const RewardFn& reward, const SearchConfig& config,
                    const AugmentFn& augment = nullptr);

// {"nodes": [{"id", "action", "payload", "visits", "q", "prior", "terminal",
// "children": [...ids]}]} for golden tests and debugging.
nlohmann::json tree_stats(const MctsNode& root);

} // namespace ragopt
