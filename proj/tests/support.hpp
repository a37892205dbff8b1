#pragma once

// Shared test scaffolding. The oracle routines here are deliberately written
// as plain loops so they stay independent of the library's Eigen-based
// computation paths.

#include "vdf/graph.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

// Fresh working directory under the system temp root.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline Eigen::MatrixXd random_features(int n, int dims, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Eigen::MatrixXd x(n, dims);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dims; ++j) x(i, j) = uni(rng);
    return x;
}

inline Eigen::MatrixXd naive_matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            for (Eigen::Index j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
}

inline Eigen::MatrixXd naive_matpow(const Eigen::MatrixXd& s, int m) {
    Eigen::MatrixXd p = s;
    for (int i = 2; i <= m; ++i) p = naive_matmul(p, s);
    return p;
}

// Literal change-level sum: f_i = sum_m sum_j h_m (S_b^m - S_a^m)_{ij} dist_{ij},
// with matrix powers from the naive product above.
inline Eigen::VectorXd bruteforce_change_level(const Eigen::MatrixXd& s_a,
                                               const Eigen::MatrixXd& s_b,
                                               const Eigen::MatrixXd& dist,
                                               const Eigen::VectorXd& coeffs) {
    const Eigen::Index n = s_a.rows();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (int m = 1; m <= coeffs.size(); ++m) {
        const Eigen::MatrixXd pa = naive_matpow(s_a, m);
        const Eigen::MatrixXd pb = naive_matpow(s_b, m);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                f[i] += coeffs[m - 1] * (pb(i, j) - pa(i, j)) * dist(i, j);
    }
    return f;
}

// Random KNN graph instance: features, distances, graph.
struct GraphInstance {
    Eigen::MatrixXd features;
    Eigen::MatrixXd dist;
    vdf::KnnGraph graph;
};

inline GraphInstance random_graph(int n, int k, std::mt19937_64& rng, int dims = 4) {
    GraphInstance g;
    g.features = random_features(n, dims, rng);
    g.dist = vdf::distance_matrix(g.features);
    g.graph = vdf::build_knn_graph(g.features, k, g.dist);
    return g;
}

} // namespace testsupport
