#include "antforest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "antforest/errors.hpp"

namespace antforest {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty input");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: need at least 2 values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

bool has_variance(std::span<const double> xs) {
    if (xs.size() < 2) return false;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] != xs[0]) return true;
    return false;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
    const double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: zero-variance input");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    return pearson(rx, ry);
}

OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("ols_fit: length mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("ols_fit: need at least 3 points");
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_fit: x has zero variance");
    OlsFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        rss += r * r;
    }
    const double sigma2 = rss / static_cast<double>(n - 2);
    fit.slope_se = std::sqrt(sigma2 / sxx);
    const double t = student_t_quantile(0.975, static_cast<double>(n - 2));
    fit.slope_ci_low = fit.slope - t * fit.slope_se;
    fit.slope_ci_high = fit.slope + t * fit.slope_se;
    return fit;
}

MeanCi mean_ci_normal(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("mean_ci_normal: need at least 2 values");
    MeanCi ci;
    ci.mean = mean(xs);
    const double se = std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
    ci.ci_low = ci.mean - 1.96 * se;
    ci.ci_high = ci.mean + 1.96 * se;
    return ci;
}

double student_t_quantile(double p, double df) {
    boost::math::students_t dist(df);
    return boost::math::quantile(dist, p);
}

double binary_auc(std::span<const double> scores, std::span<const double> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("binary_auc: length mismatch");
    const auto ranks = average_ranks(scores);
    double pos_rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1.0) {
            pos_rank_sum += ranks[i];
            ++pos;
        }
    }
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw DegenerateEstimateError("binary_auc: only one class present");
    const double np = static_cast<double>(pos), nn = static_cast<double>(neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double chi_squared_pvalue(double statistic, double df) {
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace antforest
