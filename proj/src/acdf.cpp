#include "antforest/acdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "antforest/parallel.hpp"
#include "antforest/stats.hpp"

namespace antforest {

void AcdfConfig::validate() const {
    if (tree_count < 1) throw std::invalid_argument("AcdfConfig: tree_count must be >= 1");
    if (ants_per_iteration < 1)
        throw std::invalid_argument("AcdfConfig: ants_per_iteration must be >= 1");
    if (iterations < 1) throw std::invalid_argument("AcdfConfig: iterations must be >= 1");
    if (alpha <= 0) throw std::invalid_argument("AcdfConfig: alpha must be > 0");
    if (beta < 0) throw std::invalid_argument("AcdfConfig: beta must be >= 0");
    if (evaporation <= 0 || evaporation > 1)
        throw std::invalid_argument("AcdfConfig: evaporation must be in (0, 1]");
    if (bins < 2) throw std::invalid_argument("AcdfConfig: bins must be >= 2");
    if (initial_pheromone <= 0)
        throw std::invalid_argument("AcdfConfig: initial_pheromone must be > 0");
}

std::size_t ConstructionGraph::value_node_id(std::size_t attr, std::size_t threshold_index,
                                             bool right_branch) const {
    std::size_t offset = 0;
    for (std::size_t a = 0; a < attr; ++a) offset += 2 * thresholds[a].size();
    return offset + 2 * threshold_index + (right_branch ? 1 : 0);
}

std::size_t ConstructionGraph::value_node_count() const {
    std::size_t total = 0;
    for (const auto& t : thresholds) total += 2 * t.size();
    return total;
}

void ConstructionGraph::reset_pheromone(double tau0) {
    tau_start.assign(attribute_count, tau0);
    tau_value.resize(attribute_count);
    for (std::size_t a = 0; a < attribute_count; ++a)
        tau_value[a].assign(2 * thresholds[a].size(), tau0);
    tau_continue.assign(value_node_count(),
                        std::vector<double>(attribute_count + 1, tau0));
}

double ConstructionGraph::min_pheromone() const {
    double m = std::numeric_limits<double>::infinity();
    for (double t : tau_start) m = std::min(m, t);
    for (const auto& v : tau_value)
        for (double t : v) m = std::min(m, t);
    for (const auto& v : tau_continue)
        for (double t : v) m = std::min(m, t);
    return m;
}

namespace {

double shannon_entropy(std::span<const double> counts, double total) {
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log(p);
        }
    }
    return h;
}

}  // namespace

ConstructionGraph build_construction_graph(const Dataset& data,
                                           std::span<const std::size_t> rows,
                                           const AcdfConfig& config) {
    if (rows.empty()) throw std::invalid_argument("build_construction_graph: no rows");
    config.validate();

    ConstructionGraph graph;
    graph.attribute_count = data.feature_count;
    graph.thresholds.resize(data.feature_count);
    graph.test_gain.resize(data.feature_count);
    graph.attr_heuristic.assign(data.feature_count, 0.0);

    const double n = static_cast<double>(rows.size());
    double parent_score = 0.0;  // entropy or variance of the targets
    std::vector<double> class_counts;
    if (data.task == Task::kClassification) {
        class_counts.assign(data.class_count, 0.0);
        for (std::size_t r : rows) class_counts[static_cast<std::size_t>(data.targets[r])] += 1.0;
        parent_score = shannon_entropy(class_counts, n);
    } else {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t r : rows) {
            sum += data.targets[r];
            sumsq += data.targets[r] * data.targets[r];
        }
        parent_score = (sumsq - sum * sum / n) / n;
    }

    std::vector<std::pair<double, double>> vals;  // (feature value, target)
    for (std::size_t a = 0; a < data.feature_count; ++a) {
        vals.clear();
        for (std::size_t r : rows) vals.emplace_back(data.at(r, a), data.targets[r]);
        std::sort(vals.begin(), vals.end());
        if (vals.front().first == vals.back().first) continue;  // constant attribute

        // Quantile boundaries, deduplicated and kept only when they separate.
        auto& ts = graph.thresholds[a];
        for (std::size_t q = 1; q < config.bins; ++q) {
            const std::size_t pos = q * rows.size() / config.bins;
            if (pos == 0 || pos >= rows.size()) continue;
            if (vals[pos - 1].first == vals[pos].first) continue;
            const double thr = 0.5 * (vals[pos - 1].first + vals[pos].first);
            if (ts.empty() || thr > ts.back()) ts.push_back(thr);
        }
        auto& gains = graph.test_gain[a];
        gains.reserve(ts.size());
        for (double thr : ts) {
            double gain = 0.0;
            if (data.task == Task::kClassification) {
                std::vector<double> left(data.class_count, 0.0),
                    right(class_counts);
                double nl = 0.0;
                for (const auto& [v, y] : vals) {
                    if (v > thr) break;
                    left[static_cast<std::size_t>(y)] += 1.0;
                    right[static_cast<std::size_t>(y)] -= 1.0;
                    nl += 1.0;
                }
                const double nr = n - nl;
                gain = parent_score - (nl / n) * shannon_entropy(left, nl) -
                       (nr / n) * shannon_entropy(right, nr);
            } else {
                double lsum = 0.0, lsumsq = 0.0, nl = 0.0;
                double tsum = 0.0, tsumsq = 0.0;
                for (const auto& [v, y] : vals) {
                    tsum += y;
                    tsumsq += y * y;
                    if (v <= thr) {
                        lsum += y;
                        lsumsq += y * y;
                        nl += 1.0;
                    }
                }
                const double nr = n - nl;
                const double lvar = (lsumsq - lsum * lsum / nl) / nl;
                const double rsum = tsum - lsum, rsumsq = tsumsq - lsumsq;
                const double rvar = (rsumsq - rsum * rsum / nr) / nr;
                gain = parent_score - (nl / n) * lvar - (nr / n) * rvar;
            }
            gains.push_back(std::max(0.0, gain));
        }
        if (!gains.empty())
            graph.attr_heuristic[a] = *std::max_element(gains.begin(), gains.end());
    }

    // A stop edge as attractive as an average usable attribute keeps rule
    // lengths adaptive without a hard cap.
    double gain_sum = 0.0;
    std::size_t usable = 0;
    for (std::size_t a = 0; a < data.feature_count; ++a) {
        if (graph.attribute_usable(a)) {
            gain_sum += graph.attr_heuristic[a];
            ++usable;
        }
    }
    graph.stop_heuristic = usable > 0 ? gain_sum / static_cast<double>(usable) : 1.0;

    graph.reset_pheromone(config.initial_pheromone);
    return graph;
}

std::vector<double> transition_probabilities(std::span<const double> tau,
                                             std::span<const double> eta, double alpha,
                                             double beta) {
    if (tau.empty() || tau.size() != eta.size())
        throw std::invalid_argument("transition_probabilities: empty or mismatched inputs");
    std::vector<double> probs(tau.size());
    double total = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double t = alpha == 1.0 ? tau[i] : std::pow(tau[i], alpha);
        double h = 1.0;
        if (beta != 0.0) h = beta == 1.0 ? eta[i] : std::pow(eta[i], beta);
        probs[i] = t * h;
        total += probs[i];
    }
    if (total <= 0.0) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(probs.size()));
        return probs;
    }
    for (auto& p : probs) p /= total;
    return probs;
}

namespace {

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

}  // namespace

AntPath ant_walk(const ConstructionGraph& graph, const AcdfConfig& config, Rng& rng) {
    AntPath path;
    std::vector<char> visited(graph.attribute_count, 0);

    // Start node: pick the first attribute among usable ones.
    std::vector<std::size_t> feasible;
    std::vector<double> tau, eta;
    for (std::size_t a = 0; a < graph.attribute_count; ++a) {
        if (!graph.attribute_usable(a)) continue;
        feasible.push_back(a);
        tau.push_back(graph.tau_start[a]);
        eta.push_back(graph.attr_heuristic[a]);
    }
    if (feasible.empty()) {
        path.dead_end = true;
        return path;
    }
    std::size_t attr =
        feasible[sample_index(transition_probabilities(tau, eta, config.alpha, config.beta), rng)];
    path.start_edges.push_back(attr);

    while (true) {
        visited[attr] = 1;

        // Attribute node -> oriented value node.
        const auto& ts = graph.thresholds[attr];
        tau.assign(graph.tau_value[attr].begin(), graph.tau_value[attr].end());
        eta.resize(2 * ts.size());
        for (std::size_t k = 0; k < ts.size(); ++k)
            eta[2 * k] = eta[2 * k + 1] = graph.test_gain[attr][k];
        const std::size_t slot =
            sample_index(transition_probabilities(tau, eta, config.alpha, config.beta), rng);
        const std::size_t threshold_index = slot / 2;
        const bool right_branch = (slot % 2) == 1;
        path.value_edges.emplace_back(attr, slot);
        path.tests.push_back({attr, ts[threshold_index], right_branch});

        // Value node -> next attribute or the end sentinel.
        const std::size_t value_id = graph.value_node_id(attr, threshold_index, right_branch);
        feasible.clear();
        tau.clear();
        eta.clear();
        for (std::size_t a = 0; a < graph.attribute_count; ++a) {
            if (visited[a] || !graph.attribute_usable(a)) continue;
            feasible.push_back(a);
            tau.push_back(graph.tau_continue[value_id][a]);
            eta.push_back(graph.attr_heuristic[a]);
        }
        feasible.push_back(graph.attribute_count);  // end sentinel
        tau.push_back(graph.tau_continue[value_id][graph.attribute_count]);
        eta.push_back(graph.stop_heuristic);

        const std::size_t choice =
            feasible[sample_index(transition_probabilities(tau, eta, config.alpha, config.beta),
                                  rng)];
        path.continue_edges.emplace_back(value_id, choice);
        if (choice == graph.attribute_count) break;
        attr = choice;
    }
    return path;
}

void update_pheromone(ConstructionGraph& graph, std::span<const AntPath> paths, double quality,
                      double evaporation) {
    const double keep = 1.0 - evaporation;
    for (auto& t : graph.tau_start) t *= keep;
    for (auto& v : graph.tau_value)
        for (auto& t : v) t *= keep;
    for (auto& v : graph.tau_continue)
        for (auto& t : v) t *= keep;

    for (const auto& path : paths) {
        const std::size_t edges = path.edge_count();
        if (edges == 0) continue;
        const double deposit = std::max(0.0, quality) / static_cast<double>(edges);
        for (std::size_t a : path.start_edges) graph.tau_start[a] += deposit;
        for (const auto& [a, slot] : path.value_edges) graph.tau_value[a][slot] += deposit;
        for (const auto& [vid, next] : path.continue_edges)
            graph.tau_continue[vid][next] += deposit;
    }
}

namespace {

struct TrieNode {
    int attr = -1;  // -1: leaf slot
    double threshold = 0.0;
    int left = -1;
    int right = -1;
};

std::vector<double> payload_of(const Dataset& data, std::span<const std::size_t> rows) {
    if (data.task == Task::kRegression) {
        double sum = 0.0;
        for (std::size_t r : rows) sum += data.targets[r];
        return {sum / static_cast<double>(rows.size())};
    }
    std::vector<double> counts(data.class_count, 0.0);
    for (std::size_t r : rows) counts[static_cast<std::size_t>(data.targets[r])] += 1.0;
    for (auto& c : counts) c /= static_cast<double>(rows.size());
    return counts;
}

int convert_trie(const std::vector<TrieNode>& trie, int trie_index, const Dataset& data,
                 std::vector<std::size_t> rows, const std::vector<double>& fallback,
                 std::vector<TreeNode>& nodes) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();

    const TrieNode* t = trie_index >= 0 ? &trie[static_cast<std::size_t>(trie_index)] : nullptr;
    const std::vector<double> here = rows.empty() ? fallback : payload_of(data, rows);
    if (t == nullptr || t->attr < 0) {
        nodes[static_cast<std::size_t>(index)].leaf = here;
        return index;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        if (data.at(r, static_cast<std::size_t>(t->attr)) <= t->threshold)
            left_rows.push_back(r);
        else
            right_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left = convert_trie(trie, t->left, data, std::move(left_rows), here, nodes);
    const int right = convert_trie(trie, t->right, data, std::move(right_rows), here, nodes);
    TreeNode& node = nodes[static_cast<std::size_t>(index)];
    node.split_feature = t->attr;
    node.split_threshold = t->threshold;
    node.left = left;
    node.right = right;
    return index;
}

}  // namespace

DecisionTree merge_rules_into_tree(const Dataset& data, std::span<const std::size_t> rows,
                                   std::span<const AntPath> paths) {
    if (rows.empty()) throw std::invalid_argument("merge_rules_into_tree: no rows");

    std::vector<TrieNode> trie(1);
    for (const auto& path : paths) {
        std::size_t cur = 0;
        for (const auto& test : path.tests) {
            if (trie[cur].attr < 0) {
                trie[cur].attr = static_cast<int>(test.attribute);
                trie[cur].threshold = test.threshold;
            } else if (trie[cur].attr != static_cast<int>(test.attribute) ||
                       trie[cur].threshold != test.threshold) {
                break;  // disagrees with the claimed test; truncate this rule
            }
            int child = test.right_branch ? trie[cur].right : trie[cur].left;
            if (child < 0) {
                child = static_cast<int>(trie.size());
                (test.right_branch ? trie[cur].right : trie[cur].left) = child;
                trie.emplace_back();
            }
            cur = static_cast<std::size_t>(child);
        }
    }

    DecisionTree tree;
    tree.task = data.task;
    tree.feature_count = data.feature_count;
    tree.class_count = data.class_count;
    const std::vector<double> root_fallback = payload_of(data, rows);
    convert_trie(trie, 0, data, std::vector<std::size_t>(rows.begin(), rows.end()),
                 root_fallback, tree.nodes);
    return tree;
}

double tree_quality(const DecisionTree& tree, const Dataset& data,
                    std::span<const std::size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("tree_quality: no rows");
    const double n = static_cast<double>(rows.size());
    if (data.task == Task::kClassification) {
        double correct = 0.0;
        for (std::size_t r : rows) {
            const auto probs = tree.predict_proba(data.row(r));
            const auto cls = static_cast<std::size_t>(
                std::max_element(probs.begin(), probs.end()) - probs.begin());
            if (cls == static_cast<std::size_t>(data.targets[r])) correct += 1.0;
        }
        return correct / n;
    }
    double sum = 0.0, sumsq = 0.0, mse = 0.0;
    for (std::size_t r : rows) {
        const double y = data.targets[r];
        sum += y;
        sumsq += y * y;
        const double e = tree.predict(data.row(r)) - y;
        mse += e * e;
    }
    const double var = (sumsq - sum * sum / n) / n;
    if (var <= 0.0) return mse / n <= 0.0 ? 1.0 : 0.0;
    return std::max(0.0, 1.0 - (mse / n) / var);
}

AcoTreeResult build_tree_aco(const Dataset& data, std::span<const std::size_t> rows,
                             ConstructionGraph& graph, const AcdfConfig& config, Rng& rng,
                             const AcoIterationObserver& observer) {
    config.validate();
    AcoTreeResult best;
    best.quality = -1.0;

    std::vector<AntPath> paths(config.ants_per_iteration);
    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        std::size_t dead_ends = 0;
        for (auto& path : paths) {
            path = ant_walk(graph, config, rng);
            if (path.dead_end) ++dead_ends;
        }
        DecisionTree tree = merge_rules_into_tree(data, rows, paths);
        const double quality = tree_quality(tree, data, rows);
        update_pheromone(graph, paths, quality, config.evaporation);
        if (observer) observer(iter, graph);

        if (quality > best.quality) {
            best.quality = quality;
            best.tree = std::move(tree);
        }
        best.dead_end_walks += dead_ends;
    }
    return best;
}

Forest train_acdf(const Dataset& data, const AcdfConfig& config) {
    data.validate();
    config.validate();

    Forest forest;
    forest.task = data.task;
    forest.feature_count = data.feature_count;
    forest.class_count = data.class_count;
    forest.config.tree_count = config.tree_count;
    forest.config.mtry = data.feature_count;
    forest.config.seed = config.seed;
    forest.trees.resize(config.tree_count);
    forest.bootstrap_rows.resize(config.tree_count);

    const std::size_t n = data.row_count;
    parallel_for(config.tree_count, [&](std::size_t b) {
        Rng rng = make_rng(derive_seed(config.seed, b));
        std::vector<std::size_t> rows(n);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (auto& r : rows) r = pick(rng);

        ConstructionGraph graph = build_construction_graph(data, rows, config);
        AcoTreeResult result = build_tree_aco(data, rows, graph, config, rng);
        forest.trees[b] = std::move(result.tree);
        forest.bootstrap_rows[b] = std::move(rows);
    });
    return forest;
}

EquivalenceResult equivalence_test(std::span<const double> acc_a,
                                   std::span<const double> acc_b, double margin) {
    if (margin <= 0) throw std::invalid_argument("equivalence_test: margin must be > 0");
    if (acc_a.size() < 5 || acc_b.size() < 5)
        throw std::invalid_argument("equivalence_test: need >= 5 replicates per side");

    EquivalenceResult result;
    result.margin = margin;
    result.paired = acc_a.size() == acc_b.size();

    double diff_mean, se, df;
    if (result.paired) {
        std::vector<double> diffs(acc_a.size());
        for (std::size_t i = 0; i < acc_a.size(); ++i) diffs[i] = acc_a[i] - acc_b[i];
        diff_mean = mean(diffs);
        const double var = sample_variance(diffs);
        se = std::sqrt(var / static_cast<double>(diffs.size()));
        df = static_cast<double>(diffs.size() - 1);
    } else {
        // Welch fallback for unequal replicate counts.
        const double na = static_cast<double>(acc_a.size());
        const double nb = static_cast<double>(acc_b.size());
        const double va = sample_variance(acc_a), vb = sample_variance(acc_b);
        diff_mean = mean(acc_a) - mean(acc_b);
        se = std::sqrt(va / na + vb / nb);
        const double num = (va / na + vb / nb) * (va / na + vb / nb);
        const double den = (va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0);
        df = den > 0 ? num / den : na + nb - 2.0;
    }
    result.mean_difference = diff_mean;

    if (se == 0.0) {
        result.ci_low = result.ci_high = diff_mean;
        if (std::abs(diff_mean) < margin)
            result.verdict = EquivalenceVerdict::kEquivalent;
        else if (std::abs(diff_mean) > margin)
            result.verdict = EquivalenceVerdict::kNotEquivalent;
        else
            result.verdict = EquivalenceVerdict::kInconclusive;
        return result;
    }

    const double t95 = student_t_quantile(0.95, df);
    const double t975 = student_t_quantile(0.975, df);
    result.ci_low = diff_mean - t975 * se;
    result.ci_high = diff_mean + t975 * se;

    const double t_lower = (diff_mean + margin) / se;  // H0: diff <= -margin
    const double t_upper = (diff_mean - margin) / se;  // H0: diff >= +margin
    if (t_lower > t95 && t_upper < -t95)
        result.verdict = EquivalenceVerdict::kEquivalent;
    else if (result.ci_low > margin || result.ci_high < -margin)
        result.verdict = EquivalenceVerdict::kNotEquivalent;
    else
        result.verdict = EquivalenceVerdict::kInconclusive;
    return result;
}

const char* verdict_name(EquivalenceVerdict verdict) {
    switch (verdict) {
        case EquivalenceVerdict::kEquivalent: return "equivalent";
        case EquivalenceVerdict::kNotEquivalent: return "not-equivalent";
        case EquivalenceVerdict::kInconclusive: return "inconclusive";
    }
    return "unknown";
}

}  // namespace antforest
