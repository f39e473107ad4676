#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "antforest/forest.hpp"

namespace antforest {

struct AcdfConfig {
    std::size_t tree_count = 50;          // B
    std::size_t ants_per_iteration = 10;  // walks merged into each candidate tree
    std::size_t iterations = 20;          // candidate trees per bootstrap sample
    double alpha = 1.0;                   // pheromone exponent
    double beta = 1.0;                    // heuristic exponent
    double evaporation = 0.1;             // in (0, 1]
    std::size_t bins = 8;                 // quantile bins per attribute
    double initial_pheromone = 1.0;       // tau0
    std::uint64_t seed = 0;

    void validate() const;
};

// Start/end sentinels plus one node per attribute and, per attribute, one
// oriented value node per (quantile boundary, branch direction). The walk
// order start -> attribute -> value -> attribute -> ... -> end is acyclic;
// an attribute is never revisited on one path.
//
// Pheromone lives on edges: start->attribute, attribute->value, and
// value->continuation (an attribute or the end sentinel, index = attribute
// count). Heuristics come from information gain (classification) or variance
// reduction (regression) of each candidate test, evaluated once on the
// bootstrap sample when the graph is built.
struct ConstructionGraph {
    std::size_t attribute_count = 0;
    std::vector<std::vector<double>> thresholds;  // per attribute, sorted
    std::vector<std::vector<double>> test_gain;   // per attribute, per threshold
    std::vector<double> attr_heuristic;           // max gain per attribute
    double stop_heuristic = 0.0;                  // eta of value->end edges

    std::vector<double> tau_start;                  // [attr]
    std::vector<std::vector<double>> tau_value;     // [attr][2 * threshold + dir]
    std::vector<std::vector<double>> tau_continue;  // [value node id][attr or end]

    std::size_t value_node_id(std::size_t attr, std::size_t threshold_index,
                              bool right_branch) const;
    std::size_t value_node_count() const;
    bool attribute_usable(std::size_t attr) const { return !thresholds[attr].empty(); }

    void reset_pheromone(double tau0);
    double min_pheromone() const;
};

ConstructionGraph build_construction_graph(const Dataset& data,
                                           std::span<const std::size_t> rows,
                                           const AcdfConfig& config);

// p_i proportional to tau_i^alpha * eta_i^beta over the feasible edges;
// uniform when every numerator is zero.
std::vector<double> transition_probabilities(std::span<const double> tau,
                                             std::span<const double> eta, double alpha,
                                             double beta);

struct RuleTest {
    std::size_t attribute = 0;
    double threshold = 0.0;
    bool right_branch = false;  // false: follow x <= t, true: follow x > t
};

struct AntPath {
    std::vector<RuleTest> tests;
    // Edges walked, for the pheromone update.
    std::vector<std::size_t> start_edges;                           // at most one attr
    std::vector<std::pair<std::size_t, std::size_t>> value_edges;   // (attr, slot)
    std::vector<std::pair<std::size_t, std::size_t>> continue_edges;  // (value id, attr/end)
    bool dead_end = false;  // no usable attribute was reachable

    std::size_t edge_count() const {
        return start_edges.size() + value_edges.size() + continue_edges.size();
    }
};

// One walk from start to end, sampling each transition from the pheromone
// and heuristic mixture.
AntPath ant_walk(const ConstructionGraph& graph, const AcdfConfig& config, Rng& rng);

// Evaporates every edge by (1 - evaporation), then deposits
// quality / edge_count on every edge of every path. Deposits are skipped for
// empty paths.
void update_pheromone(ConstructionGraph& graph, std::span<const AntPath> paths,
                      double quality, double evaporation);

// Merges rule paths into one binary tree: a rule claims trie slots top-down;
// a rule whose next test disagrees with an already-claimed slot is truncated
// there. Leaves take the majority class / mean of the bootstrap rows routed
// to them, falling back to the nearest ancestor with rows.
DecisionTree merge_rules_into_tree(const Dataset& data, std::span<const std::size_t> rows,
                                   std::span<const AntPath> paths);

// Training accuracy on the bootstrap rows (classification) or a clamped
// 1 - MSE/Var score (regression); both in [0, 1].
double tree_quality(const DecisionTree& tree, const Dataset& data,
                    std::span<const std::size_t> rows);

struct AcoTreeResult {
    DecisionTree tree;
    double quality = 0.0;
    std::size_t dead_end_walks = 0;
};

using AcoIterationObserver =
    std::function<void(std::size_t iteration, const ConstructionGraph& graph)>;

// Runs config.iterations rounds of ants_per_iteration walks, merges each
// round into a candidate tree, scores it on the bootstrap rows and feeds the
// score back into the pheromone. Returns the best candidate.
AcoTreeResult build_tree_aco(const Dataset& data, std::span<const std::size_t> rows,
                             ConstructionGraph& graph, const AcdfConfig& config, Rng& rng,
                             const AcoIterationObserver& observer = {});

// B trees, each from a fresh bootstrap sample, fresh construction graph and
// fresh pheromone. The result is an ordinary Forest: prediction, OOB and
// every forest invariant apply unchanged.
Forest train_acdf(const Dataset& data, const AcdfConfig& config);

enum class EquivalenceVerdict { kEquivalent, kNotEquivalent, kInconclusive };

struct EquivalenceResult {
    EquivalenceVerdict verdict = EquivalenceVerdict::kInconclusive;
    double mean_difference = 0.0;
    double ci_low = 0.0;   // 95% CI of the mean difference
    double ci_high = 0.0;
    double margin = 0.0;
    bool paired = true;  // falls back to Welch when replicate counts differ
};

// Two one-sided tests at level 0.05 of |mean_a - mean_b| <= margin. Paired
// by position when the vectors have equal length.
EquivalenceResult equivalence_test(std::span<const double> acc_a,
                                   std::span<const double> acc_b, double margin);

const char* verdict_name(EquivalenceVerdict verdict);

}  // namespace antforest
