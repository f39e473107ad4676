#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace antforest {

// Plug-in joint distribution over up to a handful of discretized variables.
// All information quantities are in nats.
class JointHistogram {
public:
    // Equal-width bins per variable over the observed range; a constant
    // variable collapses into its first bin.
    static JointHistogram from_samples(const std::vector<std::vector<double>>& variables,
                                       std::size_t bins);

    // Exact distribution given directly as cell counts (row-major over dims).
    static JointHistogram from_counts(std::vector<std::size_t> dims,
                                      std::vector<double> counts);

    std::size_t dimensions() const { return dims_.size(); }
    double sample_count() const { return total_; }
    const std::vector<std::size_t>& dims() const { return dims_; }

    // Shannon entropy of the marginal over the given variable subset.
    double entropy(std::span<const std::size_t> vars) const;
    double entropy_all() const;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> counts_;
    double total_ = 0.0;
};

// I(X; Y) for a 2-variable histogram; >= 0 up to rounding.
double mutual_information(const JointHistogram& hist);

// I(X1; Y) + I(X2; Y) - I(X1, X2; Y) for a 3-variable histogram (X1, X2, Y).
// Positive values indicate redundancy, negative synergy.
double interaction_information(const JointHistogram& hist);

// Co-information of all variables in the histogram,
// -sum over subsets T of (-1)^|T| H(T). Matches interaction_information for
// three variables.
double co_information(const JointHistogram& hist);

// I(X1..Xk; Y) where the last histogram variable is Y.
double joint_mutual_information(const JointHistogram& hist);

struct InfoDecomposition {
    double unit_info = 0.0;  // I(X1; Y)
    double pair_info = 0.0;  // I(X1; X2; Y)
    std::size_t ensemble_size = 0;
    bool has_joint_info = false;  // exact joint computed only for M <= 4
    double joint_info = 0.0;
    double pairwise_approx = 0.0;  // M * I_unit - C(M,2) * I_pair
    // I^(k) for k = 3..M (co-information of the first k units and Y),
    // filled only when the joint is computed.
    std::vector<double> higher_order;
    bool sparse_warning = false;  // fewer samples than histogram cells
    std::string warning;
};

// unit_assessments[i] is the length-n sample vector of unit i; truth is the
// length-n target sample. Requires M >= 2 and n >= bins^2.
InfoDecomposition ensemble_info_decomposition(
    const std::vector<std::vector<double>>& unit_assessments,
    const std::vector<double>& truth, std::size_t bins);

struct ThetaCondition {
    std::vector<double> crossings;  // theta values where the objective derivative flips
    bool degenerate = false;        // derivative identically ~0 on the grid
    bool multiple = false;          // more than one crossing
};

// Central differences of both curves on the interior grid; reports where
// dI_unit/dtheta - (M/2) dI_pair/dtheta changes sign (linear interpolation
// between bracketing points).
ThetaCondition optimal_theta_condition(std::span<const double> thetas,
                                       std::span<const double> unit_info_curve,
                                       std::span<const double> pair_info_curve,
                                       std::size_t ensemble_size);

}  // namespace antforest
