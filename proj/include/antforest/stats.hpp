#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace antforest {

double mean(std::span<const double> xs);

// Unbiased sample variance (n-1 denominator). Requires xs.size() >= 2.
double sample_variance(std::span<const double> xs);

// Pearson correlation. Throws std::invalid_argument if either side has zero
// variance or the lengths differ.
double pearson(std::span<const double> xs, std::span<const double> ys);

bool has_variance(std::span<const double> xs);

// Spearman rank correlation (average ranks on ties).
double spearman(std::span<const double> xs, std::span<const double> ys);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double slope_ci_low = 0.0;   // 95% CI via Student t
    double slope_ci_high = 0.0;
    std::size_t n = 0;
};

OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys);

struct MeanCi {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// Normal-approximation 95% CI of the mean over replicate values.
MeanCi mean_ci_normal(std::span<const double> xs);

// Student t distribution quantile, P(T <= x) = p with df degrees of freedom.
double student_t_quantile(double p, double df);

// Rank-based AUC for binary labels (positive = 1); ties get average ranks.
// Throws DegenerateEstimateError when only one class is present.
double binary_auc(std::span<const double> scores, std::span<const double> labels);

// Upper-tail p-value of a chi-squared statistic.
double chi_squared_pvalue(double statistic, double df);

}  // namespace antforest
