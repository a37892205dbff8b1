#include "vdf/filter.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace vdf {

double truncation_transfer(double gamma, double cutoff) {
    const double s = gamma > cutoff ? 1.0 : (gamma < cutoff ? -1.0 : 0.0);
    return 0.5 * (s + 1.0);
}

double PolynomialFilter::evaluate(double gamma) const {
    double acc = 0.0;
    double power = 1.0;
    for (int m = 1; m <= order; ++m) {
        power *= gamma;
        acc += coeffs[m - 1] * power;
    }
    return acc;
}

PolynomialFilter fit_lowpass_coeffs(int order, double cutoff, int grid_points) {
    if (order < 1) throw std::invalid_argument("fit_lowpass_coeffs: order must be >= 1");
    if (!(cutoff > -1.0 && cutoff < 1.0))
        throw std::invalid_argument("fit_lowpass_coeffs: cutoff must lie in (-1,1)");
    if (grid_points < order + 1)
        throw std::invalid_argument("fit_lowpass_coeffs: need at least order+1 grid points");

    Eigen::MatrixXd basis(grid_points, order);  // columns g, g^2, ..., g^M
    Eigen::VectorXd target(grid_points);
    for (int g = 0; g < grid_points; ++g) {
        double gamma = -1.0 + 2.0 * g / (grid_points - 1);
        // A grid point that mathematically coincides with the cutoff must
        // take the midpoint value 1/2; don't let grid rounding flip it.
        if (std::abs(gamma - cutoff) < 1e-9) gamma = cutoff;
        double power = 1.0;
        for (int m = 0; m < order; ++m) {
            power *= gamma;
            basis(g, m) = power;
        }
        target[g] = truncation_transfer(gamma, cutoff);
    }

    const Eigen::MatrixXd gram = basis.transpose() * basis;
    const Eigen::VectorXd rhs = basis.transpose() * target;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible())
        throw std::runtime_error("fit_lowpass_coeffs: singular normal equations");

    PolynomialFilter filter;
    filter.order = order;
    filter.coeffs = lu.solve(rhs);
    filter.target = TransferSpec{cutoff, grid_points};
    return filter;
}

std::vector<Eigen::VectorXd> power_hadamard_rowsum(const ShiftOperator& s,
                                                   const DistanceMatrix& dist, int order) {
    if (s.matrix.rows() != dist.rows() || s.matrix.cols() != dist.cols())
        throw std::invalid_argument("power_hadamard_rowsum: dimension mismatch");
    if (order < 1) throw std::invalid_argument("power_hadamard_rowsum: order must be >= 1");

    std::vector<Eigen::VectorXd> rowsums;
    rowsums.reserve(order);
    Eigen::MatrixXd power = s.matrix;  // S^1
    rowsums.push_back((power.array() * dist.array()).rowwise().sum());
    for (int m = 2; m <= order; ++m) {
        power = (power * s.matrix).eval();  // S^m
        rowsums.push_back((power.array() * dist.array()).rowwise().sum());
    }
    return rowsums;
}

std::pair<std::vector<Eigen::VectorXd>, std::vector<Eigen::VectorXd>> power_hadamard_rowsum(
    const ShiftOperator& s, const DistanceMatrix& dist_a, const DistanceMatrix& dist_b,
    int order) {
    if (s.matrix.rows() != dist_a.rows() || s.matrix.rows() != dist_b.rows())
        throw std::invalid_argument("power_hadamard_rowsum: dimension mismatch");
    if (order < 1) throw std::invalid_argument("power_hadamard_rowsum: order must be >= 1");

    std::vector<Eigen::VectorXd> ra, rb;
    ra.reserve(order);
    rb.reserve(order);
    Eigen::MatrixXd power = s.matrix;
    ra.push_back((power.array() * dist_a.array()).rowwise().sum());
    rb.push_back((power.array() * dist_b.array()).rowwise().sum());
    for (int m = 2; m <= order; ++m) {
        power = (power * s.matrix).eval();
        ra.push_back((power.array() * dist_a.array()).rowwise().sum());
        rb.push_back((power.array() * dist_b.array()).rowwise().sum());
    }
    return {std::move(ra), std::move(rb)};
}

Eigen::VectorXd combine_rowsums(const std::vector<Eigen::VectorXd>& rowsums_a,
                                const std::vector<Eigen::VectorXd>& rowsums_b,
                                const PolynomialFilter& filter) {
    if (static_cast<int>(rowsums_a.size()) < filter.order ||
        static_cast<int>(rowsums_b.size()) < filter.order)
        throw std::invalid_argument("combine_rowsums: missing orders");
    Eigen::VectorXd f = Eigen::VectorXd::Zero(rowsums_a[0].size());
    for (int m = 1; m <= filter.order; ++m)
        f += filter.coeff(m) * (rowsums_b[m - 1] - rowsums_a[m - 1]);
    return f;
}

Eigen::VectorXd change_level(const ShiftOperator& s_a, const ShiftOperator& s_b,
                             const DistanceMatrix& dist, const PolynomialFilter& filter) {
    if (!row_constant_action(s_a.kind) || !row_constant_action(s_b.kind))
        throw std::invalid_argument(
            "change_level: operator kind must be one of Wavg/P/Lrw (row-normalized); "
            "unnormalized operators leak heterogeneous scale");
    if (s_a.size() != s_b.size() || s_a.size() != dist.rows())
        throw std::invalid_argument("change_level: dimension mismatch");
    return combine_rowsums(power_hadamard_rowsum(s_a, dist, filter.order),
                           power_hadamard_rowsum(s_b, dist, filter.order), filter);
}

Eigen::VectorXd first_order_di(const ShiftOperator& a_t1, const ShiftOperator& a_t2,
                               const DistanceMatrix& dist, int k) {
    if (a_t1.kind != OperatorKind::Adjacency || a_t2.kind != OperatorKind::Adjacency)
        throw std::invalid_argument("first_order_di: expects raw adjacency operators");
    if (a_t1.size() != a_t2.size() || a_t1.size() != dist.rows())
        throw std::invalid_argument("first_order_di: dimension mismatch");
    if (k < 1) throw std::invalid_argument("first_order_di: K must be >= 1");
    return ((a_t2.matrix - a_t1.matrix).array() * dist.array()).rowwise().sum() /
           static_cast<double>(k);
}

void write_coeffs_csv(const PolynomialFilter& filter, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "order,coefficient\n";
    for (int m = 1; m <= filter.order; ++m) out << m << ',' << filter.coeff(m) << '\n';
}

} // namespace vdf
