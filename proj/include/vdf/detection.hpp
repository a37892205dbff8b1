#pragma once

#include "vdf/filter.hpp"
#include "vdf/graph.hpp"
#include "vdf/image.hpp"
#include "vdf/segmentation.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace vdf {

enum class SegmentationMode { Patch, Superpixel };
enum class ThresholdMethod { Otsu, KMeans2 };

struct VdfConfig {
    int target_vertices = 5000;      // N
    int k = 0;                       // K; 0 means floor(sqrt(N)) of the built graph
    int filter_order = 4;            // M
    double cutoff = 0.9;             // gamma_cf
    int max_iterations = 5;          // Iter
    OperatorKind op_kind = OperatorKind::AverageWeight;
    WeightScheme weights = WeightScheme::Binary;
    double weight_sigma = 1.0;
    SegmentationMode segmentation = SegmentationMode::Superpixel;
    int patch_size = 8;              // p, patch mode only
    ThresholdMethod threshold = ThresholdMethod::Otsu;
    double slic_compactness = 0.3;
    int min_segment_size = 25;
    int filter_grid_points = 201;
    std::uint64_t seed = 0;
};

struct ThresholdResult {
    bool valid = false;              // false when the scores carry no contrast
    double threshold = 0.0;
    std::vector<std::uint8_t> changed;
    std::size_t changed_count = 0;
};

/// Otsu's method on a 256-bin histogram of min-max-scaled scores; changed =
/// scores above the maximizing bin boundary. Constant scores are signaled
/// with valid=false and an empty changed set.
ThresholdResult otsu_threshold(const Eigen::VectorXd& scores);

/// 1-D 2-means with centers initialized at min and max; changed = the cluster
/// with the larger center. Constant scores yield an empty changed set.
ThresholdResult kmeans2_threshold(const Eigen::VectorXd& scores);

struct ChangeLevels {
    Eigen::VectorXd forward;   // f^x
    Eigen::VectorXd backward;  // f^y
    Eigen::VectorXd fused;     // in [0,1]
};

/// Fusion rule: clamp each level below at 0, min-max normalize each to [0,1]
/// (constant vectors map to zeros), sum, renormalize.
Eigen::VectorXd fuse_levels(const Eigen::VectorXd& forward, const Eigen::VectorXd& backward);

/// One round of DI computation. Builds the restricted graphs from the
/// unchanged vertex set, then
///   f^x = change_level(S(g_t1), S(restrict(g_t2)), dist^x),
///   f^y = change_level(S(g_t2), S(restrict(g_t1)), dist^y).
ChangeLevels compute_dis(const FeatureMatrix& x, const FeatureMatrix& y,
                         const KnnGraph& g_t1, const KnnGraph& g_t2,
                         const std::vector<int>& unchanged, const VdfConfig& cfg);

struct DetectionState {
    int iteration = 0;
    ChangeLevels levels;
    double threshold = 0.0;
    std::size_t changed_count = 0;
    std::size_t unchanged_count = 0;
    std::vector<std::uint8_t> changed;  // per vertex
    bool converged = false;             // changed set repeated the previous one
    bool guard_tripped = false;         // >50% flagged changed; set discarded
};

struct DetectionResult {
    SegmentMap segments;
    ChangeLevels levels;                        // final iteration
    std::vector<std::uint8_t> changed_vertices; // final accepted set
    BinaryMask change_map;
    std::vector<DetectionState> history;
    PolynomialFilter filter;
    int k_used = 0;
};

/// Full pipeline: segmentation + features + graphs, then the iterative loop
/// (DI computation, binary segmentation of the fused DI, graph restriction)
/// with early stop on a stable changed set, and pixel-level reconstruction.
DetectionResult run_vdf_hcd(const RasterImage& img_a, const RasterImage& img_b,
                            const VdfConfig& cfg);

/// Scatter per-vertex values back to pixels.
RasterImage map_to_pixels(const SegmentMap& seg, const Eigen::VectorXd& vertex_values);
BinaryMask map_to_pixels(const SegmentMap& seg, const std::vector<std::uint8_t>& changed);

} // namespace vdf
