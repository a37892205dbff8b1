#pragma once

#include "vdf/segmentation.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace vdf {

/// Squared Euclidean distances between feature rows: symmetric, zero diagonal.
using DistanceMatrix = Eigen::MatrixXd;

/// Symmetric KNN graph: j is adjacent to i when either is among the other's
/// K nearest feature rows (union rule). Neighbor lists are sorted ascending;
/// a vertex never lists itself, except for the self-loop a restriction adds
/// when all of its neighbors were removed.
struct KnnGraph {
    int n = 0;
    int k = 0;
    std::vector<std::vector<int>> neighbors;
    std::vector<std::vector<double>> edge_dist;  // squared distance per listed edge
};

enum class OperatorKind {
    Adjacency,            // A
    Weight,               // W
    AverageWeight,        // D^-1 A
    RandomWalk,           // D_w^-1 W
    Laplacian,            // D_w - W
    RandomWalkLaplacian,  // I - D_w^-1 W
    SymmetricLaplacian,   // D_w^-1/2 (D_w - W) D_w^-1/2
};

enum class WeightScheme {
    Binary,           // w = 1
    InverseDistance,  // w = 1/||x_i - x_j||  (zero distances perturbed to 1e-12)
    Gaussian,         // w = exp(-||x_i - x_j||^2 / (2 sigma^2))
};

/// Dense N-by-N realization of a graph shift operator.
struct ShiftOperator {
    OperatorKind kind = OperatorKind::AverageWeight;
    Eigen::MatrixXd matrix;

    Eigen::Index size() const { return matrix.rows(); }
};

/// True for the kinds whose rows act as constants on 1_N (row sums 1, 1, 0):
/// AverageWeight, RandomWalk, RandomWalkLaplacian. Only these are admissible
/// for change-level computation; unnormalized kinds leak heterogeneous scale.
bool row_constant_action(OperatorKind kind);

const char* operator_kind_name(OperatorKind kind);

DistanceMatrix distance_matrix(const FeatureMatrix& x);

/// Exact KNN by full scan of the distance matrix. Out-neighbors of i are the
/// K smallest dist(i,.) excluding i, ties broken by lower index; adjacency is
/// the union-symmetrized relation. Requires 1 <= k <= n-1.
KnnGraph build_knn_graph(const FeatureMatrix& x, int k, const DistanceMatrix& dist);

/// Drops every vertex outside `unchanged` from all neighbor sets, cutting off
/// signal propagation from changed vertices. All vertices keep their rows, so
/// operator dimensions stay N-by-N; a vertex left without neighbors gets a
/// self-loop so row-normalized operators remain well defined.
KnnGraph restrict_graph(const KnnGraph& g, const std::vector<int>& unchanged);

ShiftOperator to_shift_operator(const KnnGraph& g, OperatorKind kind,
                                WeightScheme scheme = WeightScheme::Binary,
                                double sigma = 1.0);

/// Debug dump: one line per vertex with its neighbor indices and distances.
void write_adjacency_text(const KnnGraph& g, std::ostream& os);

} // namespace vdf
