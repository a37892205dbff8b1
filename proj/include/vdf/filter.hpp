#pragma once

#include "vdf/graph.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace vdf {

/// Target transfer function for the fit: the truncation step
/// H(g) = (sign(g - cutoff) + 1)/2 sampled on a uniform grid over [-1,1],
/// the eigenvalue range of the row-normalized operators.
struct TransferSpec {
    double cutoff = 0.9;
    int grid_points = 201;
};

/// Value of the truncation step at gamma; sign(0) = 0, so H(cutoff) = 1/2.
double truncation_transfer(double gamma, double cutoff);

/// Polynomial filter H(S) = sum_{m=1..M} h_m S^m. There is no constant term:
/// it would cancel in the operator difference anyway.
struct PolynomialFilter {
    int order = 0;
    Eigen::VectorXd coeffs;  // h_1..h_M
    TransferSpec target;

    double coeff(int m) const { return coeffs[m - 1]; }  // 1-based like h_m
    /// Transfer-domain response sum_m h_m gamma^m.
    double evaluate(double gamma) const;
};

/// Least-squares fit of h_1..h_M to the truncation target over a uniform
/// grid, solved via the normal equations on the monomial basis {g..g^M}.
/// Requires order >= 1, cutoff in (-1,1), grid_points >= order+1; throws
/// std::runtime_error if the normal equations are singular.
PolynomialFilter fit_lowpass_coeffs(int order, double cutoff, int grid_points = 201);

/// Row sums of S^m (.) dist for m = 1..order, computed by the power
/// iteration C <- C*S; cost O((order-1) N^3).
std::vector<Eigen::VectorXd> power_hadamard_rowsum(const ShiftOperator& s,
                                                   const DistanceMatrix& dist, int order);

/// Same, against two distance matrices sharing one power iteration. The
/// detection loop leans on this: forward and backward levels reuse the
/// matrix powers of each unrestricted operator.
std::pair<std::vector<Eigen::VectorXd>, std::vector<Eigen::VectorXd>> power_hadamard_rowsum(
    const ShiftOperator& s, const DistanceMatrix& dist_a, const DistanceMatrix& dist_b,
    int order);

/// f = sum_m h_m (rowsum(S_b^m (.) dist) - rowsum(S_a^m (.) dist)).
Eigen::VectorXd combine_rowsums(const std::vector<Eigen::VectorXd>& rowsums_a,
                                const std::vector<Eigen::VectorXd>& rowsums_b,
                                const PolynomialFilter& filter);

/// Per-vertex change level: f_i = sum_m sum_j h_m ((S_b^m - S_a^m) (.) dist)_{i,j}.
/// Both operators must be of row-constant-action kind; other kinds throw.
Eigen::VectorXd change_level(const ShiftOperator& s_a, const ShiftOperator& s_b,
                             const DistanceMatrix& dist, const PolynomialFilter& filter);

/// First-order projection score d_i = (1/K) sum_j ((A_t2 - A_t1) (.) dist)_{i,j},
/// the INLPG/IRG-McS special case; operators must be raw adjacency.
Eigen::VectorXd first_order_di(const ShiftOperator& a_t1, const ShiftOperator& a_t2,
                               const DistanceMatrix& dist, int k);

/// CSV dump "order,coefficient" for the sweep tooling.
void write_coeffs_csv(const PolynomialFilter& filter, const std::string& path);

} // namespace vdf
