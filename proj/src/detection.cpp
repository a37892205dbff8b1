#include "vdf/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace vdf {

namespace {

void check_finite(const Eigen::VectorXd& scores, const char* who) {
    if (!scores.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite scores");
}

} // namespace

ThresholdResult otsu_threshold(const Eigen::VectorXd& scores) {
    if (scores.size() == 0) throw std::invalid_argument("otsu_threshold: empty scores");
    check_finite(scores, "otsu_threshold");

    const double lo = scores.minCoeff();
    const double hi = scores.maxCoeff();
    ThresholdResult result;
    result.changed.assign(scores.size(), 0);
    if (hi - lo <= 0.0) return result;  // constant scores: signal, no split

    constexpr int kBins = 256;
    const double range = hi - lo;
    std::vector<int> bin(scores.size());
    std::vector<double> hist(kBins, 0.0);
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        bin[i] = std::min(kBins - 1, static_cast<int>((scores[i] - lo) / range * kBins));
        hist[bin[i]] += 1.0;
    }

    // Exhaustive split search maximizing between-class variance of the bins.
    double cum = 0.0, cum_mean = 0.0, total_mean = 0.0;
    const double total = static_cast<double>(scores.size());
    for (int b = 0; b < kBins; ++b) total_mean += b * hist[b];
    total_mean /= total;

    int best_t = 0;
    double best_var = -1.0;
    for (int t = 0; t < kBins - 1; ++t) {
        cum += hist[t];
        cum_mean += t * hist[t];
        const double w0 = cum, w1 = total - cum;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = cum_mean / w0;
        const double mu1 = (total_mean * total - cum_mean) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }

    result.valid = true;
    result.threshold = lo + range * (best_t + 1) / kBins;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (bin[i] > best_t) {
            result.changed[i] = 1;
            ++result.changed_count;
        }
    }
    return result;
}

ThresholdResult kmeans2_threshold(const Eigen::VectorXd& scores) {
    if (scores.size() == 0) throw std::invalid_argument("kmeans2_threshold: empty scores");
    check_finite(scores, "kmeans2_threshold");

    const double lo = scores.minCoeff();
    const double hi = scores.maxCoeff();
    ThresholdResult result;
    result.changed.assign(scores.size(), 0);
    if (hi - lo <= 0.0) return result;

    double c0 = lo, c1 = hi;
    double split = 0.5 * (c0 + c1);
    for (int round = 0; round < 100; ++round) {
        double sum0 = 0.0, sum1 = 0.0;
        std::int64_t n0 = 0, n1 = 0;
        for (Eigen::Index i = 0; i < scores.size(); ++i) {
            if (scores[i] < split) {
                sum0 += scores[i];
                ++n0;
            } else {
                sum1 += scores[i];
                ++n1;
            }
        }
        // min/max initialization keeps both clusters populated
        c0 = sum0 / static_cast<double>(n0);
        c1 = sum1 / static_cast<double>(n1);
        const double next = 0.5 * (c0 + c1);
        if (next == split) break;
        split = next;
    }

    result.valid = true;
    result.threshold = split;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (scores[i] >= split) {  // cluster with the larger center
            result.changed[i] = 1;
            ++result.changed_count;
        }
    }
    return result;
}

namespace {

Eigen::VectorXd clamp_minmax01(const Eigen::VectorXd& v) {
    Eigen::VectorXd c = v.cwiseMax(0.0);
    const double lo = c.minCoeff();
    const double hi = c.maxCoeff();
    if (hi - lo <= 0.0) return Eigen::VectorXd::Zero(v.size());
    return (c.array() - lo) / (hi - lo);
}

std::vector<int> mask_to_set(const std::vector<std::uint8_t>& mask) {
    std::vector<int> set;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) set.push_back(static_cast<int>(i));
    return set;
}

void validate_config(const VdfConfig& cfg) {
    if (cfg.filter_order < 1) throw std::invalid_argument("config: filter order must be >= 1");
    if (!(cfg.cutoff > -1.0 && cfg.cutoff < 1.0))
        throw std::invalid_argument("config: cutoff must lie in (-1,1)");
    if (cfg.max_iterations < 1) throw std::invalid_argument("config: need at least one iteration");
    if (cfg.target_vertices < 1) throw std::invalid_argument("config: target vertex count must be >= 1");
    if (!row_constant_action(cfg.op_kind))
        throw std::invalid_argument("config: operator must be one of Wavg/P/Lrw for DI computation");
}

} // namespace

Eigen::VectorXd fuse_levels(const Eigen::VectorXd& forward, const Eigen::VectorXd& backward) {
    if (forward.size() != backward.size())
        throw std::invalid_argument("fuse_levels: size mismatch");
    return clamp_minmax01(clamp_minmax01(forward) + clamp_minmax01(backward));
}

ChangeLevels compute_dis(const FeatureMatrix& x, const FeatureMatrix& y,
                         const KnnGraph& g_t1, const KnnGraph& g_t2,
                         const std::vector<int>& unchanged, const VdfConfig& cfg) {
    if (x.rows() != y.rows() || x.rows() != g_t1.n || g_t1.n != g_t2.n)
        throw std::invalid_argument("compute_dis: vertex count mismatch");
    validate_config(cfg);

    const DistanceMatrix dist_x = distance_matrix(x);
    const DistanceMatrix dist_y = distance_matrix(y);
    const PolynomialFilter filter =
        fit_lowpass_coeffs(cfg.filter_order, cfg.cutoff, cfg.filter_grid_points);

    const ShiftOperator s_t1 = to_shift_operator(g_t1, cfg.op_kind, cfg.weights, cfg.weight_sigma);
    const ShiftOperator s_t2 = to_shift_operator(g_t2, cfg.op_kind, cfg.weights, cfg.weight_sigma);
    const ShiftOperator s_t2n = to_shift_operator(restrict_graph(g_t2, unchanged), cfg.op_kind,
                                                  cfg.weights, cfg.weight_sigma);
    const ShiftOperator s_t1n = to_shift_operator(restrict_graph(g_t1, unchanged), cfg.op_kind,
                                                  cfg.weights, cfg.weight_sigma);

    ChangeLevels levels;
    levels.forward = change_level(s_t1, s_t2n, dist_x, filter);
    levels.backward = change_level(s_t2, s_t1n, dist_y, filter);
    levels.fused = fuse_levels(levels.forward, levels.backward);
    return levels;
}

RasterImage map_to_pixels(const SegmentMap& seg, const Eigen::VectorXd& vertex_values) {
    if (vertex_values.size() != seg.segment_count)
        throw std::invalid_argument("map_to_pixels: value count does not match segments");
    RasterImage img(seg.height, seg.width, 1);
    for (std::size_t p = 0; p < seg.labels.size(); ++p)
        img.data[p] = vertex_values[seg.labels[p]];
    return img;
}

BinaryMask map_to_pixels(const SegmentMap& seg, const std::vector<std::uint8_t>& changed) {
    if (changed.size() != static_cast<std::size_t>(seg.segment_count))
        throw std::invalid_argument("map_to_pixels: value count does not match segments");
    BinaryMask mask(seg.height, seg.width);
    for (std::size_t p = 0; p < seg.labels.size(); ++p)
        mask.values[p] = changed[seg.labels[p]];
    return mask;
}

DetectionResult run_vdf_hcd(const RasterImage& img_a, const RasterImage& img_b,
                            const VdfConfig& cfg) {
    if (img_a.height != img_b.height || img_a.width != img_b.width)
        throw std::invalid_argument("run_vdf_hcd: images must be co-registered to equal sizes");
    validate_config(cfg);

    const RasterImage a = normalize_channels(img_a);
    const RasterImage b = normalize_channels(img_b);

    DetectionResult result;
    FeatureMatrix x, y;
    if (cfg.segmentation == SegmentationMode::Patch) {
        auto [seg_a, feat_a] = tile_patches(a, cfg.patch_size);
        auto [seg_b, feat_b] = tile_patches(b, cfg.patch_size);
        result.segments = std::move(seg_a);  // same grid for both images
        x = std::move(feat_a);
        y = std::move(feat_b);
    } else {
        // Sliver merging collapses the intersection back to roughly the
        // per-image count, so each SLIC aims at the target directly.
        const int per_image = std::max(1, cfg.target_vertices);
        const SegmentMap seg_a = slic_segment(a, per_image, cfg.slic_compactness);
        const SegmentMap seg_b = slic_segment(b, per_image, cfg.slic_compactness);
        result.segments = cosegment_intersect(seg_a, seg_b, cfg.min_segment_size);
        x = extract_features(a, result.segments);
        y = extract_features(b, result.segments);
    }

    const int n = result.segments.segment_count;
    const int k = cfg.k > 0 ? cfg.k : std::max(1, static_cast<int>(std::floor(std::sqrt(n))));
    result.k_used = k;
    if (n < k + 1)
        throw std::runtime_error("run_vdf_hcd: segmentation produced N=" + std::to_string(n) +
                                 " vertices but K=" + std::to_string(k) +
                                 " neighbors were requested; lower K or raise the vertex count");

    const DistanceMatrix dist_x = distance_matrix(x);
    const DistanceMatrix dist_y = distance_matrix(y);
    const KnnGraph g_t1 = build_knn_graph(x, k, dist_x);
    const KnnGraph g_t2 = build_knn_graph(y, k, dist_y);
    const ShiftOperator s_t1 = to_shift_operator(g_t1, cfg.op_kind, cfg.weights, cfg.weight_sigma);
    const ShiftOperator s_t2 = to_shift_operator(g_t2, cfg.op_kind, cfg.weights, cfg.weight_sigma);

    result.filter = fit_lowpass_coeffs(cfg.filter_order, cfg.cutoff, cfg.filter_grid_points);
    const PolynomialFilter& filter = result.filter;

    // Unrestricted operators never change across iterations; their row sums
    // against both distance matrices are reused every round.
    const auto [rs_t1_x, rs_t1_y] =
        power_hadamard_rowsum(s_t1, dist_x, dist_y, cfg.filter_order);
    const auto [rs_t2_x, rs_t2_y] =
        power_hadamard_rowsum(s_t2, dist_x, dist_y, cfg.filter_order);

    std::vector<std::uint8_t> unchanged(n, 1);  // S^0 = all vertices
    std::vector<std::uint8_t> prev_changed(n, 0);
    std::vector<std::uint8_t> accepted(n, 0);
    ChangeLevels accepted_levels;
    bool have_levels = false;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        const std::size_t unchanged_count =
            static_cast<std::size_t>(std::count(unchanged.begin(), unchanged.end(), 1));
        const bool unrestricted = unchanged_count == static_cast<std::size_t>(n);

        ChangeLevels levels;
        if (unrestricted) {
            levels.forward = combine_rowsums(rs_t1_x, rs_t2_x, filter);
            levels.backward = combine_rowsums(rs_t2_y, rs_t1_y, filter);
        } else {
            const std::vector<int> keep = mask_to_set(unchanged);
            {
                const ShiftOperator s_t2n = to_shift_operator(restrict_graph(g_t2, keep),
                                                              cfg.op_kind, cfg.weights,
                                                              cfg.weight_sigma);
                levels.forward = combine_rowsums(
                    rs_t1_x, power_hadamard_rowsum(s_t2n, dist_x, cfg.filter_order), filter);
            }
            {
                const ShiftOperator s_t1n = to_shift_operator(restrict_graph(g_t1, keep),
                                                              cfg.op_kind, cfg.weights,
                                                              cfg.weight_sigma);
                levels.backward = combine_rowsums(
                    rs_t2_y, power_hadamard_rowsum(s_t1n, dist_y, cfg.filter_order), filter);
            }
        }
        levels.fused = fuse_levels(levels.forward, levels.backward);

        const ThresholdResult thr = cfg.threshold == ThresholdMethod::Otsu
                                        ? otsu_threshold(levels.fused)
                                        : kmeans2_threshold(levels.fused);
        std::vector<std::uint8_t> changed =
            thr.valid ? thr.changed : std::vector<std::uint8_t>(n, 0);
        const std::size_t changed_count = thr.valid ? thr.changed_count : 0;

        DetectionState state;
        state.iteration = iter;
        state.levels = levels;
        state.threshold = thr.threshold;
        state.changed_count = changed_count;
        state.unchanged_count = n - changed_count;
        state.changed = changed;

        // A majority of "changed" vertices contradicts the sparse-change
        // prior and would gut the graphs; keep the previous set and stop.
        if (changed_count * 2 > static_cast<std::size_t>(n)) {
            state.guard_tripped = true;
            if (!have_levels) {
                accepted_levels = levels;
                have_levels = true;
            }
            result.history.push_back(std::move(state));
            break;
        }

        accepted = changed;
        accepted_levels = levels;
        have_levels = true;

        if (changed == prev_changed) {
            state.converged = true;
            result.history.push_back(std::move(state));
            break;
        }
        prev_changed = changed;
        for (int i = 0; i < n; ++i) unchanged[i] = changed[i] ? 0 : 1;
        result.history.push_back(std::move(state));
    }

    result.levels = std::move(accepted_levels);
    result.changed_vertices = std::move(accepted);
    result.change_map = map_to_pixels(result.segments, result.changed_vertices);
    return result;
}

} // namespace vdf
