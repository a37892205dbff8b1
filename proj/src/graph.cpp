#include "vdf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace vdf {

bool row_constant_action(OperatorKind kind) {
    return kind == OperatorKind::AverageWeight || kind == OperatorKind::RandomWalk ||
           kind == OperatorKind::RandomWalkLaplacian;
}

const char* operator_kind_name(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::Adjacency: return "A";
        case OperatorKind::Weight: return "W";
        case OperatorKind::AverageWeight: return "Wavg";
        case OperatorKind::RandomWalk: return "P";
        case OperatorKind::Laplacian: return "L";
        case OperatorKind::RandomWalkLaplacian: return "Lrw";
        case OperatorKind::SymmetricLaplacian: return "Lsym";
    }
    return "?";
}

DistanceMatrix distance_matrix(const FeatureMatrix& x) {
    const Eigen::Index n = x.rows();
    if (n < 2) throw std::invalid_argument("distance_matrix: need at least two rows");
    // ||xi - xj||^2 = ||xi||^2 + ||xj||^2 - 2 xi.xj
    const Eigen::VectorXd sq = x.rowwise().squaredNorm();
    Eigen::MatrixXd gram = -2.0 * (x * x.transpose());
    gram.colwise() += sq;
    gram.rowwise() += sq.transpose();
    // Guard rounding and force exact symmetry and zero diagonal.
    DistanceMatrix d = 0.5 * (gram + gram.transpose());
    d = d.cwiseMax(0.0);
    d.diagonal().setZero();
    return d;
}

KnnGraph build_knn_graph(const FeatureMatrix& x, int k, const DistanceMatrix& dist) {
    const int n = static_cast<int>(x.rows());
    if (dist.rows() != n || dist.cols() != n)
        throw std::invalid_argument("build_knn_graph: distance matrix size mismatch");
    if (k < 1 || k > n - 1) throw std::invalid_argument("build_knn_graph: K out of range");

    // K smallest distances per row, excluding self; ties by lower index.
    std::vector<std::vector<int>> adjacency(n);
    std::vector<int> idx(n - 1);
    for (int i = 0; i < n; ++i) {
        int w = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) idx[w++] = j;
        std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), [&](int a, int b) {
            const double da = dist(i, a), db = dist(i, b);
            return da != db ? da < db : a < b;
        });
        for (int t = 0; t < k; ++t) {
            const int j = idx[t];
            adjacency[i].push_back(j);  // out-neighbor
            adjacency[j].push_back(i);  // union rule: i joins j's set
        }
    }

    KnnGraph g;
    g.n = n;
    g.k = k;
    g.neighbors.resize(n);
    g.edge_dist.resize(n);
    for (int i = 0; i < n; ++i) {
        auto& nb = adjacency[i];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        g.neighbors[i] = std::move(nb);
        g.edge_dist[i].reserve(g.neighbors[i].size());
        for (int j : g.neighbors[i]) g.edge_dist[i].push_back(dist(i, j));
    }
    return g;
}

KnnGraph restrict_graph(const KnnGraph& g, const std::vector<int>& unchanged) {
    std::vector<char> keep(g.n, 0);
    for (int v : unchanged) {
        if (v < 0 || v >= g.n) throw std::invalid_argument("restrict_graph: vertex out of range");
        keep[v] = 1;
    }

    KnnGraph out;
    out.n = g.n;
    out.k = g.k;
    out.neighbors.resize(g.n);
    out.edge_dist.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        for (std::size_t t = 0; t < g.neighbors[i].size(); ++t) {
            const int j = g.neighbors[i][t];
            if (keep[j]) {
                out.neighbors[i].push_back(j);
                out.edge_dist[i].push_back(g.edge_dist[i][t]);
            }
        }
        if (out.neighbors[i].empty()) {
            // Self-loop keeps the row stochastic; the vertex receives no
            // foreign signal.
            out.neighbors[i].push_back(i);
            out.edge_dist[i].push_back(0.0);
        }
    }
    return out;
}

ShiftOperator to_shift_operator(const KnnGraph& g, OperatorKind kind, WeightScheme scheme,
                                double sigma) {
    const int n = g.n;
    if (n == 0) throw std::invalid_argument("to_shift_operator: empty graph");
    if (scheme == WeightScheme::Gaussian && sigma <= 0.0)
        throw std::invalid_argument("to_shift_operator: sigma must be positive");

    Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);      // neighbor counts
    Eigen::VectorXd wdegree = Eigen::VectorXd::Zero(n);     // weighted degrees
    for (int i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < g.neighbors[i].size(); ++t) {
            const int j = g.neighbors[i][t];
            double w = 1.0;
            if (scheme == WeightScheme::InverseDistance) {
                double d2 = g.edge_dist[i][t];
                if (d2 <= 0.0) d2 = 1e-12;  // identical features; keep the weight finite
                w = 1.0 / std::sqrt(d2);
            } else if (scheme == WeightScheme::Gaussian) {
                w = std::exp(-g.edge_dist[i][t] / (2.0 * sigma * sigma));
            }
            weight(i, j) = w;
            degree[i] += 1.0;
            wdegree[i] += w;
        }
    }

    ShiftOperator op;
    op.kind = kind;
    switch (kind) {
        case OperatorKind::Adjacency: {
            op.matrix = (weight.array() > 0.0).cast<double>();
            break;
        }
        case OperatorKind::Weight: {
            op.matrix = weight;
            break;
        }
        case OperatorKind::AverageWeight: {
            if ((degree.array() <= 0.0).any())
                throw std::runtime_error("to_shift_operator: zero-degree vertex");
            op.matrix = degree.cwiseInverse().asDiagonal() *
                        (weight.array() > 0.0).cast<double>().matrix();
            break;
        }
        case OperatorKind::RandomWalk: {
            if ((wdegree.array() <= 0.0).any())
                throw std::runtime_error("to_shift_operator: zero-degree vertex");
            op.matrix = wdegree.cwiseInverse().asDiagonal() * weight;
            break;
        }
        case OperatorKind::Laplacian: {
            op.matrix = -weight;
            op.matrix.diagonal() += wdegree;
            break;
        }
        case OperatorKind::RandomWalkLaplacian: {
            if ((wdegree.array() <= 0.0).any())
                throw std::runtime_error("to_shift_operator: zero-degree vertex");
            op.matrix = -(wdegree.cwiseInverse().asDiagonal() * weight);
            op.matrix += Eigen::MatrixXd::Identity(n, n);
            break;
        }
        case OperatorKind::SymmetricLaplacian: {
            if ((wdegree.array() <= 0.0).any())
                throw std::runtime_error("to_shift_operator: zero-degree vertex");
            Eigen::VectorXd dinv_sqrt = wdegree.array().rsqrt();
            Eigen::MatrixXd lap = -weight;
            lap.diagonal() += wdegree;
            op.matrix = dinv_sqrt.asDiagonal() * lap * dinv_sqrt.asDiagonal();
            break;
        }
    }
    return op;
}

void write_adjacency_text(const KnnGraph& g, std::ostream& os) {
    for (int i = 0; i < g.n; ++i) {
        os << i;
        for (std::size_t t = 0; t < g.neighbors[i].size(); ++t)
            os << ' ' << g.neighbors[i][t] << ':' << g.edge_dist[i][t];
        os << '\n';
    }
}

} // namespace vdf
