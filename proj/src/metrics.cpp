#include "vdf/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vdf {

ConfusionCounts confusion(const BinaryMask& cm, const BinaryMask& gt) {
    if (cm.height != gt.height || cm.width != gt.width)
        throw std::invalid_argument("confusion: dimension mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < cm.values.size(); ++i) {
        const bool pred = cm.values[i] != 0;
        const bool truth = gt.values[i] != 0;
        if (pred && truth) ++c.tp;
        else if (pred && !truth) ++c.fp;
        else if (!pred && truth) ++c.fn;
        else ++c.tn;
    }
    return c;
}

CmScores oa_fm_kc(const ConfusionCounts& c) {
    const double total = static_cast<double>(c.total());
    if (total <= 0.0) throw std::invalid_argument("oa_fm_kc: empty confusion counts");
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);

    CmScores s;
    s.oa = (tp + tn) / total;
    s.pre = ((tp + fn) * (tp + fp) + (tn + fp) * (tn + fn)) / (total * total);
    if (tp + fp + fn == 0.0) {
        s.fm = 1.0;  // all-negative scene predicted perfectly
        s.fm_degenerate = true;
    } else {
        s.fm = 2.0 * tp / (2.0 * tp + fp + fn);
    }
    if (s.pre >= 1.0) {
        s.kc = 0.0;
        s.kc_degenerate = true;
    } else {
        s.kc = (s.oa - s.pre) / (1.0 - s.pre);
    }
    return s;
}

CurveSet roc_pr_curves(const std::vector<double>& scores,
                       const std::vector<std::uint8_t>& positives) {
    if (scores.size() != positives.size())
        throw std::invalid_argument("roc_pr_curves: size mismatch");
    std::uint64_t pos = 0;
    for (auto v : positives) pos += v ? 1 : 0;
    const std::uint64_t neg = positives.size() - pos;
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc_pr_curves: ground truth has a single class");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    CurveSet out;
    out.roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

    std::uint64_t tp = 0, fp = 0;
    std::size_t i = 0;
    bool first_group = true;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // one step per distinct score: everything >= threshold turns positive
        while (i < order.size() && scores[order[i]] == threshold) {
            if (positives[order[i]]) ++tp;
            else ++fp;
            ++i;
        }
        const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
        const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        out.roc.push_back({threshold, fpr, tpr});
        if (first_group) {
            // anchor so the trapezoid spans recall in [0,1]
            out.pr.push_back({threshold, 0.0, precision});
            first_group = false;
        }
        out.pr.push_back({threshold, tpr, precision});
    }

    for (std::size_t t = 1; t < out.roc.size(); ++t)
        out.aur += 0.5 * (out.roc[t].tpr + out.roc[t - 1].tpr) *
                   (out.roc[t].fpr - out.roc[t - 1].fpr);
    for (std::size_t t = 1; t < out.pr.size(); ++t)
        out.aup += 0.5 * (out.pr[t].precision + out.pr[t - 1].precision) *
                   (out.pr[t].recall - out.pr[t - 1].recall);
    return out;
}

CurveSet roc_pr_curves(const RasterImage& scores, const BinaryMask& gt) {
    if (scores.channels != 1 || scores.height != gt.height || scores.width != gt.width)
        throw std::invalid_argument("roc_pr_curves: score field does not match the mask");
    return roc_pr_curves(scores.data, gt.values);
}

void write_roc_csv(const CurveSet& curves, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "threshold,fpr,tpr\n";
    for (const auto& p : curves.roc) out << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
}

void write_pr_csv(const CurveSet& curves, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "threshold,recall,precision\n";
    for (const auto& p : curves.pr)
        out << p.threshold << ',' << p.recall << ',' << p.precision << '\n';
}

} // namespace vdf
