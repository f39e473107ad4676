#include "antforest/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace antforest {

JointHistogram JointHistogram::from_samples(const std::vector<std::vector<double>>& variables,
                                            std::size_t bins) {
    if (variables.empty()) throw std::invalid_argument("JointHistogram: no variables");
    if (bins < 1) throw std::invalid_argument("JointHistogram: bins must be >= 1");
    const std::size_t n = variables[0].size();
    if (n == 0) throw std::invalid_argument("JointHistogram: empty samples");
    for (const auto& v : variables)
        if (v.size() != n) throw std::invalid_argument("JointHistogram: ragged samples");

    const std::size_t d = variables.size();
    std::vector<double> lo(d), width(d);
    for (std::size_t v = 0; v < d; ++v) {
        const auto [mn, mx] = std::minmax_element(variables[v].begin(), variables[v].end());
        lo[v] = *mn;
        width[v] = (*mx - *mn) / static_cast<double>(bins);
    }

    JointHistogram hist;
    hist.dims_.assign(d, bins);
    std::size_t cells = 1;
    for (std::size_t v = 0; v < d; ++v) cells *= bins;
    hist.counts_.assign(cells, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t index = 0;
        for (std::size_t v = 0; v < d; ++v) {
            std::size_t b = 0;
            if (width[v] > 0.0) {
                b = static_cast<std::size_t>((variables[v][i] - lo[v]) / width[v]);
                if (b >= bins) b = bins - 1;  // the max lands in the last bin
            }
            index = index * bins + b;
        }
        hist.counts_[index] += 1.0;
    }
    hist.total_ = static_cast<double>(n);
    return hist;
}

JointHistogram JointHistogram::from_counts(std::vector<std::size_t> dims,
                                           std::vector<double> counts) {
    if (dims.empty()) throw std::invalid_argument("JointHistogram: no dimensions");
    std::size_t cells = 1;
    for (std::size_t d : dims) {
        if (d < 1) throw std::invalid_argument("JointHistogram: zero-size dimension");
        cells *= d;
    }
    if (counts.size() != cells)
        throw std::invalid_argument("JointHistogram: counts shape mismatch");
    JointHistogram hist;
    hist.total_ = 0.0;
    for (double c : counts) {
        if (c < 0) throw std::invalid_argument("JointHistogram: negative count");
        hist.total_ += c;
    }
    if (hist.total_ <= 0) throw std::invalid_argument("JointHistogram: empty histogram");
    hist.dims_ = std::move(dims);
    hist.counts_ = std::move(counts);
    return hist;
}

double JointHistogram::entropy(std::span<const std::size_t> vars) const {
    for (std::size_t v : vars)
        if (v >= dims_.size()) throw std::invalid_argument("entropy: variable out of range");

    // Marginalize by re-keying every cell onto the selected variables.
    std::unordered_map<std::size_t, double> marginal;
    std::vector<std::size_t> index(dims_.size(), 0);
    for (std::size_t cell = 0; cell < counts_.size(); ++cell) {
        if (counts_[cell] > 0.0) {
            std::size_t key = 0;
            for (std::size_t v : vars) key = key * dims_[v] + index[v];
            marginal[key] += counts_[cell];
        }
        for (std::size_t v = dims_.size(); v-- > 0;) {
            if (++index[v] < dims_[v]) break;
            index[v] = 0;
        }
    }

    double h = 0.0;
    for (const auto& [key, count] : marginal) {
        const double p = count / total_;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double JointHistogram::entropy_all() const {
    std::vector<std::size_t> all(dims_.size());
    std::iota(all.begin(), all.end(), 0);
    return entropy(all);
}

double mutual_information(const JointHistogram& hist) {
    if (hist.dimensions() != 2)
        throw std::invalid_argument("mutual_information: need a 2-variable histogram");
    const std::size_t x[] = {0}, y[] = {1};
    return hist.entropy(x) + hist.entropy(y) - hist.entropy_all();
}

double interaction_information(const JointHistogram& hist) {
    if (hist.dimensions() != 3)
        throw std::invalid_argument("interaction_information: need a 3-variable histogram");
    const std::size_t x1[] = {0}, x2[] = {1}, y[] = {2};
    const std::size_t x1y[] = {0, 2}, x2y[] = {1, 2}, x1x2[] = {0, 1};
    const double i1 = hist.entropy(x1) + hist.entropy(y) - hist.entropy(x1y);
    const double i2 = hist.entropy(x2) + hist.entropy(y) - hist.entropy(x2y);
    const double i12 = hist.entropy(x1x2) + hist.entropy(y) - hist.entropy_all();
    return i1 + i2 - i12;
}

double co_information(const JointHistogram& hist) {
    const std::size_t d = hist.dimensions();
    if (d > 20) throw std::invalid_argument("co_information: too many variables");
    double total = 0.0;
    std::vector<std::size_t> subset;
    for (std::size_t mask = 1; mask < (1ULL << d); ++mask) {
        subset.clear();
        for (std::size_t v = 0; v < d; ++v)
            if (mask & (1ULL << v)) subset.push_back(v);
        const double sign = (subset.size() % 2 == 0) ? -1.0 : 1.0;
        total += sign * hist.entropy(subset);
    }
    return total;
}

double joint_mutual_information(const JointHistogram& hist) {
    const std::size_t d = hist.dimensions();
    if (d < 2) throw std::invalid_argument("joint_mutual_information: need >= 2 variables");
    std::vector<std::size_t> xs(d - 1);
    std::iota(xs.begin(), xs.end(), 0);
    const std::size_t y[] = {d - 1};
    return hist.entropy(xs) + hist.entropy(y) - hist.entropy_all();
}

InfoDecomposition ensemble_info_decomposition(
    const std::vector<std::vector<double>>& unit_assessments, const std::vector<double>& truth,
    std::size_t bins) {
    const std::size_t m = unit_assessments.size();
    if (m < 2) throw std::invalid_argument("ensemble_info_decomposition: need M >= 2");
    const std::size_t n = truth.size();
    if (n < bins * bins)
        throw std::invalid_argument("ensemble_info_decomposition: need n >= bins^2");
    for (const auto& unit : unit_assessments)
        if (unit.size() != n)
            throw std::invalid_argument("ensemble_info_decomposition: ragged samples");

    InfoDecomposition out;
    out.ensemble_size = m;
    out.unit_info =
        mutual_information(JointHistogram::from_samples({unit_assessments[0], truth}, bins));
    out.pair_info = interaction_information(
        JointHistogram::from_samples({unit_assessments[0], unit_assessments[1], truth}, bins));
    const double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
    out.pairwise_approx = static_cast<double>(m) * out.unit_info - pairs * out.pair_info;

    if (m <= 4) {
        std::vector<std::vector<double>> all(unit_assessments.begin(), unit_assessments.end());
        all.push_back(truth);
        const JointHistogram joint = JointHistogram::from_samples(all, bins);
        out.has_joint_info = true;
        out.joint_info = joint_mutual_information(joint);

        double cells = 1.0;
        for (std::size_t i = 0; i < m + 1; ++i) cells *= static_cast<double>(bins);
        if (static_cast<double>(n) < cells) {
            out.sparse_warning = true;
            out.warning = "joint histogram has more cells than samples";
        }

        for (std::size_t k = 3; k <= m; ++k) {
            std::vector<std::vector<double>> vars(unit_assessments.begin(),
                                                  unit_assessments.begin() + static_cast<long>(k));
            vars.push_back(truth);
            out.higher_order.push_back(
                co_information(JointHistogram::from_samples(vars, bins)));
        }
    }
    return out;
}

ThetaCondition optimal_theta_condition(std::span<const double> thetas,
                                       std::span<const double> unit_info_curve,
                                       std::span<const double> pair_info_curve,
                                       std::size_t ensemble_size) {
    const std::size_t g = thetas.size();
    if (g < 3) throw std::invalid_argument("optimal_theta_condition: need >= 3 grid points");
    if (unit_info_curve.size() != g || pair_info_curve.size() != g)
        throw std::invalid_argument("optimal_theta_condition: curve length mismatch");
    for (std::size_t i = 1; i < g; ++i)
        if (thetas[i] <= thetas[i - 1])
            throw std::invalid_argument("optimal_theta_condition: grid must be increasing");
    if (ensemble_size < 1)
        throw std::invalid_argument("optimal_theta_condition: ensemble size must be >= 1");

    const double half_m = 0.5 * static_cast<double>(ensemble_size);
    std::vector<double> interior_theta, objective;
    double scale = 0.0;
    for (std::size_t i = 1; i + 1 < g; ++i) {
        const double dt = thetas[i + 1] - thetas[i - 1];
        const double du = (unit_info_curve[i + 1] - unit_info_curve[i - 1]) / dt;
        const double dp = (pair_info_curve[i + 1] - pair_info_curve[i - 1]) / dt;
        interior_theta.push_back(thetas[i]);
        objective.push_back(du - half_m * dp);
        scale = std::max(scale, std::abs(du) + half_m * std::abs(dp));
    }

    ThetaCondition result;
    const double eps = 1e-9 * std::max(scale, 1e-12);
    bool all_zero = true;
    for (double v : objective)
        if (std::abs(v) > eps) all_zero = false;
    if (all_zero) {
        result.degenerate = true;
        return result;
    }

    for (std::size_t i = 0; i < objective.size(); ++i) {
        if (std::abs(objective[i]) <= eps) {
            result.crossings.push_back(interior_theta[i]);
        } else if (i + 1 < objective.size() && std::abs(objective[i + 1]) > eps &&
                   objective[i] * objective[i + 1] < 0.0) {
            const double t = objective[i] / (objective[i] - objective[i + 1]);
            result.crossings.push_back(interior_theta[i] +
                                       t * (interior_theta[i + 1] - interior_theta[i]));
        }
    }
    result.multiple = result.crossings.size() > 1;
    return result;
}

}  // namespace antforest
