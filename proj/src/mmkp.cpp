#include "ragopt/mmkp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ragopt/errors.hpp"
#include "ragopt/kernels.hpp"

namespace ragopt {

using nlohmann::json;

namespace {

constexpr std::int64_t kCentiInf = std::numeric_limits<std::int64_t>::max();

// Redundancy costs are handled in exact centi units so the DP and the
// enumeration oracle make identical feasibility and dominance decisions.
std::int64_t red_capacity_centi(double red) {
    if (red >= 1e15) return kCentiInf;
    return std::llround(red * 100.0);
}

std::int64_t red_cost_centi(double red) { return std::llround(red * 100.0); }

double quantize_red(double red) { return std::round(red * 100.0) / 100.0; }

std::vector<std::string> selection_ids(const MmkpInstance& instance,
                                       const std::vector<std::int16_t>& picks) {
    std::vector<std::string> ids;
    for (std::size_t g = 0; g < picks.size(); ++g) {
        if (picks[g] >= 0) ids.push_back(instance.groups[g][picks[g]].chunk_id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

int pick_count(const std::vector<std::int16_t>& picks) {
    int count = 0;
    for (std::int16_t p : picks) count += (p >= 0);
    return count;
}

// Tie order: fewer items first, then lexicographically smallest sorted id
// list. Value comparison happens before this is consulted.
bool tie_prefers(const MmkpInstance& instance, const std::vector<std::int16_t>& a,
                 const std::vector<std::int16_t>& b) {
    int ca = pick_count(a);
    int cb = pick_count(b);
    if (ca != cb) return ca < cb;
    return selection_ids(instance, a) < selection_ids(instance, b);
}

struct DpState {
    std::int64_t ct = 0;
    std::int64_t cr = 0; // centi units
    double value = 0.0;
    std::vector<std::int16_t> picks;
};

// Merge states sharing a cost point, keeping max value (ties by pick order),
// then optionally drop strictly dominated states. Expects nothing of input
// order; output is sorted by (ct, cr).
void prune_states(const MmkpInstance& instance, std::vector<DpState>& states, bool prune) {
    std::sort(states.begin(), states.end(), [](const DpState& a, const DpState& b) {
        if (a.ct != b.ct) return a.ct < b.ct;
        if (a.cr != b.cr) return a.cr < b.cr;
        return a.value > b.value;
    });

    // One state per (ct, cr): the value-max / tie-preferred representative.
    std::vector<DpState> merged;
    merged.reserve(states.size());
    for (DpState& s : states) {
        if (!merged.empty() && merged.back().ct == s.ct && merged.back().cr == s.cr) {
            DpState& kept = merged.back();
            if (s.value > kept.value ||
                (s.value == kept.value && tie_prefers(instance, s.picks, kept.picks))) {
                kept = std::move(s);
            }
        } else {
            merged.push_back(std::move(s));
        }
    }

    if (!prune) {
        states = std::move(merged);
        return;
    }

    // Sweep in (ct, cr) order; `staircase` maps cr -> best value among kept
    // states with cost at most the current one in both dimensions.
    std::vector<DpState> kept;
    kept.reserve(merged.size());
    std::map<std::int64_t, double> staircase;
    for (DpState& s : merged) {
        auto it = staircase.upper_bound(s.cr);
        if (it != staircase.begin()) {
            double best = std::prev(it)->second;
            if (best >= s.value) continue; // dominated (merge removed identicals)
        }
        auto pos = staircase.insert_or_assign(s.cr, s.value).first;
        for (auto next = std::next(pos); next != staircase.end() && next->second <= s.value;) {
            next = staircase.erase(next);
        }
        kept.push_back(std::move(s));
    }
    states = std::move(kept);
}

MmkpSolution finish_solution(const MmkpInstance& instance, double value,
                             const std::vector<std::int16_t>& picks) {
    MmkpSolution sol;
    sol.total_value = value;
    std::int64_t cr = 0;
    for (std::size_t g = 0; g < picks.size(); ++g) {
        if (picks[g] < 0) continue;
        const MmkpItem& item = instance.groups[g][picks[g]];
        sol.cost_token += item.cost_token;
        cr += red_cost_centi(item.cost_red);
    }
    sol.cost_red = static_cast<double>(cr) / 100.0;
    sol.selected = selection_ids(instance, picks);
    return sol;
}

void validate_instance(const MmkpInstance& instance) {
    if (instance.capacity_token < 0 || instance.capacity_red < 0) {
        throw ValidationError("mmkp: capacity components must be >= 0");
    }
    for (const auto& group : instance.groups) {
        for (const MmkpItem& item : group) {
            if (item.cost_token < 0 || item.cost_red < 0 || item.value < 0) {
                throw ValidationError("mmkp: item \"" + item.chunk_id +
                                      "\" has a negative value or cost");
            }
        }
        if (group.size() > 30000) {
            throw ValidationError("mmkp: group too large");
        }
    }
}

} // namespace

MmkpSolution solve_exact(const MmkpInstance& instance) {
    validate_instance(instance);

    double combos = 1.0;
    for (const auto& group : instance.groups) {
        combos *= static_cast<double>(group.size() + 1);
        if (combos > static_cast<double>(1 << 24)) {
            throw ValidationError(
                "solve_exact: choice space exceeds 2^24, use solve_pareto_dp");
        }
    }

    const std::int64_t cap_cr = red_capacity_centi(instance.capacity_red);
    std::vector<std::int16_t> picks(instance.groups.size(), -1);
    std::vector<std::int16_t> best_picks;
    double best_value = -1.0;
    bool have_best = false;

    auto consider = [&](double value) {
        if (!have_best || value > best_value ||
            (value == best_value && tie_prefers(instance, picks, best_picks))) {
            have_best = true;
            best_value = value;
            best_picks = picks;
        }
    };

    auto walk = [&](auto&& self, std::size_t g, std::int64_t ct, std::int64_t cr,
                    double value) -> void {
        if (g == instance.groups.size()) {
            consider(value);
            return;
        }
        picks[g] = -1;
        self(self, g + 1, ct, cr, value);
        const auto& group = instance.groups[g];
        for (std::size_t j = 0; j < group.size(); ++j) {
            const MmkpItem& item = group[j];
            std::int64_t ict = ct + item.cost_token;
            if (ict > instance.capacity_token) continue;
            std::int64_t icr = cr + red_cost_centi(item.cost_red);
            if (cap_cr != kCentiInf && icr > cap_cr) continue;
            picks[g] = static_cast<std::int16_t>(j);
            self(self, g + 1, ict, icr, value + item.value);
        }
        picks[g] = -1;
    };
    walk(walk, 0, 0, 0, 0.0);
    (void)have_best; // the all-skip pick is always feasible
    return finish_solution(instance, best_value, best_picks);
}

MmkpSolution solve_pareto_dp(const MmkpInstance& instance, const DpOptions& options) {
    validate_instance(instance);
    if (instance.capacity_token >= std::numeric_limits<std::int64_t>::max()) {
        throw ValidationError("solve_pareto_dp: token capacity must be finite");
    }

    const std::int64_t cap_cr = red_capacity_centi(instance.capacity_red);
    std::vector<DpState> frontier;
    frontier.push_back(DpState{0, 0, 0.0, {}});

    for (const auto& group : instance.groups) {
        std::vector<DpState> next;
        next.reserve(frontier.size() * (group.size() + 1));
        for (const DpState& s : frontier) {
            DpState skip = s;
            skip.picks.push_back(-1);
            next.push_back(std::move(skip));
            for (std::size_t j = 0; j < group.size(); ++j) {
                const MmkpItem& item = group[j];
                std::int64_t ict = s.ct + item.cost_token;
                if (ict > instance.capacity_token) continue;
                std::int64_t icr = s.cr + red_cost_centi(item.cost_red);
                if (cap_cr != kCentiInf && icr > cap_cr) continue;
                DpState ext = s;
                ext.ct = ict;
                ext.cr = icr;
                ext.value += item.value;
                ext.picks.push_back(static_cast<std::int16_t>(j));
                next.push_back(std::move(ext));
            }
        }
        prune_states(instance, next, options.prune);
        frontier = std::move(next);
    }

    const DpState* best = nullptr;
    for (const DpState& s : frontier) {
        if (best == nullptr || s.value > best->value ||
            (s.value == best->value && tie_prefers(instance, s.picks, best->picks))) {
            best = &s;
        }
    }
    return finish_solution(instance, best->value, best->picks);
}

FptasResult fptas_knapsack(const std::vector<double>& values,
                           const std::vector<double>& weights, double capacity, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw ValidationError("fptas_knapsack: eps must lie in (0, 1)");
    }
    if (values.empty() || values.size() != weights.size()) {
        throw ValidationError("fptas_knapsack: needs n >= 1 items with matching weights");
    }
    const std::size_t n = values.size();
    double max_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] <= 0.0) throw ValidationError("fptas_knapsack: values must be positive");
        if (weights[i] < 0.0) throw ValidationError("fptas_knapsack: weights must be >= 0");
        max_value = std::max(max_value, values[i]);
    }

    const double scale_k = eps * max_value / static_cast<double>(n);
    std::vector<std::int64_t> scaled(n);
    std::int64_t scaled_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = static_cast<std::int64_t>(std::floor(values[i] / scale_k));
        scaled_total += scaled[i];
    }
    if (static_cast<double>(n + 1) * static_cast<double>(scaled_total + 1) > 5e7) {
        throw ValidationError("fptas_knapsack: scaled value table too large");
    }

    // dp[i][p] = min weight achieving scaled value exactly p with items < i.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dp(n + 1,
                                        std::vector<double>(scaled_total + 1, inf));
    dp[0][0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::int64_t vi = scaled[i - 1];
        const double wi = weights[i - 1];
        for (std::int64_t p = 0; p <= scaled_total; ++p) {
            dp[i][p] = dp[i - 1][p];
            if (p >= vi && dp[i - 1][p - vi] + wi < dp[i][p]) {
                dp[i][p] = dp[i - 1][p - vi] + wi;
            }
        }
    }

    std::int64_t best_p = -1;
    for (std::int64_t p = scaled_total; p >= 0; --p) {
        if (dp[n][p] <= capacity) {
            best_p = p;
            break;
        }
    }

    FptasResult result;
    if (best_p < 0) return result; // capacity below zero: nothing fits
    std::int64_t p = best_p;
    for (std::size_t i = n; i >= 1; --i) {
        if (dp[i][p] != dp[i - 1][p]) {
            result.selected.push_back(i - 1);
            result.value += values[i - 1];
            p -= scaled[i - 1];
        }
    }
    std::reverse(result.selected.begin(), result.selected.end());
    return result;
}

MmkpInstance reduce_knapsack_to_mmkp(const std::vector<double>& values,
                                     const std::vector<std::int64_t>& weights,
                                     std::int64_t capacity) {
    if (values.size() != weights.size()) {
        throw ValidationError("reduce_knapsack_to_mmkp: values/weights size mismatch");
    }
    MmkpInstance instance;
    instance.capacity_token = capacity;
    instance.capacity_red = MmkpInstance::kRedInfinity;
    for (std::size_t i = 0; i < values.size(); ++i) {
        MmkpItem take;
        take.chunk_id = "kp" + std::to_string(i) + "_take";
        take.group_index = static_cast<int>(i);
        take.value = values[i];
        take.cost_token = weights[i];
        MmkpItem skip;
        skip.chunk_id = "kp" + std::to_string(i) + "_skip";
        skip.group_index = static_cast<int>(i);
        instance.groups.push_back({std::move(take), std::move(skip)});
    }
    return instance;
}

std::vector<Group> group_chunks(const std::vector<ScoredChunk>& candidates,
                                const ChunkStore& store, double tau) {
    if (candidates.empty()) throw ValidationError("group_chunks: empty candidate list");
    if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("group_chunks: tau must be in (0, 1]");

    std::vector<ScoredChunk> ordered = candidates;
    std::sort(ordered.begin(), ordered.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        return a.fusion_score != b.fusion_score ? a.fusion_score > b.fusion_score
                                                : a.chunk_id < b.chunk_id;
    });

    std::vector<Group> groups;
    for (const ScoredChunk& sc : ordered) {
        const Chunk* chunk = store.find(sc.chunk_id);
        if (chunk == nullptr) {
            throw ValidationError("group_chunks: unknown chunk id \"" + sc.chunk_id + "\"");
        }
        Group* home = nullptr;
        for (Group& g : groups) {
            if (cosine(chunk->embedding, g.centroid) >= tau) {
                home = &g;
                break;
            }
        }
        if (home == nullptr) {
            Group g;
            g.index = static_cast<int>(groups.size());
            g.member_ids.push_back(sc.chunk_id);
            g.centroid = chunk->embedding;
            groups.push_back(std::move(g));
            continue;
        }
        home->member_ids.push_back(sc.chunk_id);
        std::vector<float> mean(store.dim(), 0.0f);
        for (const std::string& id : home->member_ids) {
            kernels::add_into(mean.data(), store.find(id)->embedding.data(), mean.size());
        }
        kernels::scale(mean.data(), mean.size(),
                       1.0f / static_cast<float>(home->member_ids.size()));
        normalize_or_e0(mean);
        home->centroid = std::move(mean);
    }
    return groups;
}

std::vector<double> minmax_normalize(const std::vector<double>& scores) {
    if (scores.empty()) return {};
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size(), 1.0);
    if (*hi > *lo) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            out[i] = (scores[i] - *lo) / (*hi - *lo);
        }
    }
    return out;
}

double item_utility(double fusion_norm, std::span<const float> chunk_vec,
                    std::span<const float> centroid, double alpha, double beta) {
    if (alpha < 0.0 || beta < 0.0) {
        throw ValidationError("item_utility: alpha and beta must be >= 0");
    }
    double u = alpha * fusion_norm + beta * (1.0 - cosine(chunk_vec, centroid));
    return std::max(u, 0.0);
}

CostPair item_costs(const Chunk& chunk, const Group& group, const ChunkStore& store,
                    double lambda_red) {
    if (std::find(group.member_ids.begin(), group.member_ids.end(), chunk.id) ==
        group.member_ids.end()) {
        throw ValidationError("item_costs: chunk \"" + chunk.id + "\" not in group");
    }
    CostPair costs;
    costs.token = chunk.token_len;
    if (group.member_ids.size() <= 1) return costs; // no redundancy possible

    double sim_sum = 0.0;
    for (const std::string& other_id : group.member_ids) {
        if (other_id == chunk.id) continue;
        sim_sum += cosine(chunk.embedding, store.find(other_id)->embedding);
    }
    double mean_sim = sim_sum / static_cast<double>(group.member_ids.size() - 1);
    costs.red = quantize_red(std::max(0.0, lambda_red * mean_sim));
    return costs;
}

BuiltInstance build_instance(const std::vector<ScoredChunk>& candidates,
                             const ChunkStore& store, const MmkpParams& params) {
    BuiltInstance built;
    built.groups = group_chunks(candidates, store, params.tau);
    built.instance.capacity_token = params.c_token;
    built.instance.capacity_red = params.c_red;

    std::vector<double> fusion(candidates.size());
    std::unordered_map<std::string, double> fusion_norm;
    for (std::size_t i = 0; i < candidates.size(); ++i) fusion[i] = candidates[i].fusion_score;
    std::vector<double> norm = minmax_normalize(fusion);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        fusion_norm[candidates[i].chunk_id] = norm[i];
    }

    for (const Group& group : built.groups) {
        std::vector<MmkpItem> items;
        items.reserve(group.member_ids.size());
        for (const std::string& id : group.member_ids) {
            const Chunk* chunk = store.find(id);
            MmkpItem item;
            item.chunk_id = id;
            item.group_index = group.index;
            item.value = item_utility(fusion_norm.at(id), chunk->embedding, group.centroid,
                                      params.alpha, params.beta);
            CostPair costs = item_costs(*chunk, group, store, params.lambda_red);
            item.cost_token = costs.token;
            item.cost_red = costs.red;
            items.push_back(std::move(item));
        }
        built.instance.groups.push_back(std::move(items));
    }
    return built;
}

SelectionResult select_context(const std::vector<ScoredChunk>& candidates,
                               const ChunkStore& store, const MmkpParams& params) {
    SelectionResult result;
    if (candidates.empty()) return result;

    BuiltInstance built = build_instance(candidates, store, params);
    result.groups = std::move(built.groups);
    result.solution = solve_pareto_dp(built.instance);

    std::unordered_map<std::string, double> fusion;
    for (const ScoredChunk& sc : candidates) fusion[sc.chunk_id] = sc.fusion_score;
    result.context = result.solution.selected;
    std::sort(result.context.begin(), result.context.end(),
              [&](const std::string& a, const std::string& b) {
                  double fa = fusion.at(a);
                  double fb = fusion.at(b);
                  return fa != fb ? fa > fb : a < b;
              });
    return result;
}

std::vector<std::string> select_topk_budget(const std::vector<ScoredChunk>& candidates,
                                            const ChunkStore& store, std::int64_t c_token) {
    std::vector<ScoredChunk> ordered = candidates;
    std::sort(ordered.begin(), ordered.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        return a.fusion_score != b.fusion_score ? a.fusion_score > b.fusion_score
                                                : a.chunk_id < b.chunk_id;
    });
    std::vector<std::string> selected;
    std::int64_t used = 0;
    for (const ScoredChunk& sc : ordered) {
        const Chunk* chunk = store.find(sc.chunk_id);
        if (chunk == nullptr) {
            throw ValidationError("select_topk_budget: unknown chunk id \"" + sc.chunk_id + "\"");
        }
        if (used + chunk->token_len > c_token) break;
        used += chunk->token_len;
        selected.push_back(sc.chunk_id);
    }
    return selected;
}

json instance_to_json(const MmkpInstance& instance) {
    json groups = json::array();
    for (const auto& group : instance.groups) {
        json items = json::array();
        for (const MmkpItem& item : group) {
            items.push_back({{"id", item.chunk_id},
                             {"value", item.value},
                             {"cost_token", item.cost_token},
                             {"cost_red", item.cost_red}});
        }
        groups.push_back(std::move(items));
    }
    return json{{"groups", std::move(groups)},
                {"capacity", json::array({instance.capacity_token, instance.capacity_red})}};
}

MmkpInstance instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("groups") || !j.contains("capacity") ||
        !j["groups"].is_array() || !j["capacity"].is_array() || j["capacity"].size() != 2) {
        throw ParseError("mmkp instance: expected {\"groups\": [...], \"capacity\": [int, float]}");
    }
    MmkpInstance instance;
    instance.capacity_token = j["capacity"][0].get<std::int64_t>();
    instance.capacity_red = j["capacity"][1].get<double>();
    int group_index = 0;
    for (const json& group : j["groups"]) {
        std::vector<MmkpItem> items;
        for (const json& rec : group) {
            MmkpItem item;
            item.chunk_id = rec.at("id").get<std::string>();
            item.group_index = group_index;
            item.value = rec.at("value").get<double>();
            item.cost_token = rec.at("cost_token").get<std::int64_t>();
            item.cost_red = rec.at("cost_red").get<double>();
            items.push_back(std::move(item));
        }
        instance.groups.push_back(std::move(items));
        ++group_index;
    }
    validate_instance(instance);
    return instance;
}

json solution_to_json(const MmkpSolution& solution) {
    return json{{"selected", solution.selected},
                {"total_value", solution.total_value},
                {"total_cost", json::array({solution.cost_token, solution.cost_red})}};
}

MmkpInstance random_instance(std::mt19937_64& rng, const InstanceGenParams& params) {
    MmkpInstance instance;
    const int n_groups = 1 + static_cast<int>(rng() % params.max_groups);
    std::int64_t total_token = 0;
    std::int64_t total_centi = 0;
    for (int g = 0; g < n_groups; ++g) {
        const int n_items = 1 + static_cast<int>(rng() % params.max_items_per_group);
        std::vector<MmkpItem> items;
        for (int j = 0; j < n_items; ++j) {
            MmkpItem item;
            item.chunk_id = "g" + std::to_string(g) + "i" + std::to_string(j);
            item.group_index = g;
            item.value = static_cast<double>(rng() % 1025) / 64.0;
            item.cost_token = static_cast<std::int64_t>(rng() % (params.max_token_cost + 1));
            item.cost_red =
                static_cast<double>(rng() % (params.max_red_centi + 1)) / 100.0;
            total_token += item.cost_token;
            total_centi += red_cost_centi(item.cost_red);
            items.push_back(std::move(item));
        }
        instance.groups.push_back(std::move(items));
    }
    instance.capacity_token = static_cast<std::int64_t>(rng() % (total_token + 1));
    instance.capacity_red =
        static_cast<double>(rng() % (total_centi + 1)) / 100.0;
    return instance;
}

KnapsackInstance random_knapsack(std::mt19937_64& rng, int max_items) {
    KnapsackInstance kp;
    const int n = 1 + static_cast<int>(rng() % max_items);
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) {
        kp.values.push_back(static_cast<double>(1 + rng() % 1024) / 64.0);
        kp.weights.push_back(static_cast<std::int64_t>(rng() % 51));
        total += kp.weights.back();
    }
    kp.capacity = static_cast<std::int64_t>(rng() % (total + 1));
    return kp;
}

} // namespace ragopt
