#pragma once

#include "vdf/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vdf {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Per-pixel tabulation; positive = changed. Dimensions must match.
ConfusionCounts confusion(const BinaryMask& cm, const BinaryMask& gt);

struct CmScores {
    double oa = 0.0;
    double fm = 0.0;
    double kc = 0.0;
    double pre = 0.0;           // chance-agreement term of the kappa
    bool fm_degenerate = false; // TP+FP+FN = 0: Fm reported as 1
    bool kc_degenerate = false; // PRE = 1: Kc reported as 0
};

/// OA = (TP+TN)/total, Fm = 2TP/(2TP+FP+FN), Kc = (OA-PRE)/(1-PRE) with
/// PRE = ((TP+FN)(TP+FP) + (TN+FP)(TN+FN)) / total^2.
CmScores oa_fm_kc(const ConfusionCounts& c);

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

struct PrPoint {
    double threshold;
    double recall;
    double precision;
};

struct CurveSet {
    std::vector<RocPoint> roc;
    std::vector<PrPoint> pr;
    double aur = 0.0;
    double aup = 0.0;
};

/// Threshold sweep over all distinct score values (descending, equal scores
/// grouped into one step); a sample is predicted positive when its score
/// reaches the threshold. Areas by the trapezoid rule; the PR curve is
/// anchored at (recall 0, precision of the top group). Requires at least one
/// positive and one negative label.
CurveSet roc_pr_curves(const std::vector<double>& scores,
                       const std::vector<std::uint8_t>& positives);

/// Pixel-raster adapter: scores as a single-channel image against a mask.
CurveSet roc_pr_curves(const RasterImage& scores, const BinaryMask& gt);

void write_roc_csv(const CurveSet& curves, const std::string& path);
void write_pr_csv(const CurveSet& curves, const std::string& path);

} // namespace vdf
