#include "vdf/metrics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>

using namespace vdf;

namespace {

BinaryMask mask_from(const std::vector<int>& v, int h, int w) {
    BinaryMask m(h, w);
    for (std::size_t i = 0; i < v.size(); ++i) m.values[i] = v[i] ? 1 : 0;
    return m;
}

// Exhaustive reference: for every distinct score (descending), classify
// "score >= threshold" and tabulate directly.
struct RefCurves {
    std::vector<std::array<double, 3>> roc;  // thr, fpr, tpr
    std::vector<std::array<double, 3>> pr;   // thr, recall, precision
    double aur = 0.0, aup = 0.0;
};

RefCurves reference_curves(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels) {
    std::set<double, std::greater<double>> thresholds(scores.begin(), scores.end());
    double pos = 0, neg = 0;
    for (auto l : labels) (l ? pos : neg) += 1.0;

    RefCurves ref;
    ref.roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    bool first = true;
    for (double thr : thresholds) {
        double tp = 0, fp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= thr) (labels[i] ? tp : fp) += 1.0;
        }
        ref.roc.push_back({thr, fp / neg, tp / pos});
        if (first) {
            ref.pr.push_back({thr, 0.0, tp / (tp + fp)});
            first = false;
        }
        ref.pr.push_back({thr, tp / pos, tp / (tp + fp)});
    }
    for (std::size_t t = 1; t < ref.roc.size(); ++t)
        ref.aur += 0.5 * (ref.roc[t][2] + ref.roc[t - 1][2]) * (ref.roc[t][1] - ref.roc[t - 1][1]);
    for (std::size_t t = 1; t < ref.pr.size(); ++t)
        ref.aup += 0.5 * (ref.pr[t][2] + ref.pr[t - 1][2]) * (ref.pr[t][1] - ref.pr[t - 1][1]);
    return ref;
}

} // namespace

TEST_CASE("confusion: perfect prediction and inversion") {
    std::vector<int> gt(20, 0);
    for (int i = 0; i < 7; ++i) gt[i] = 1;
    const BinaryMask truth = mask_from(gt, 4, 5);

    const ConfusionCounts perfect = confusion(truth, truth);
    CHECK(perfect.tp == 7);
    CHECK(perfect.tn == 13);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    std::vector<int> inv(20);
    for (int i = 0; i < 20; ++i) inv[i] = 1 - gt[i];
    const ConfusionCounts flipped = confusion(mask_from(inv, 4, 5), truth);
    CHECK(flipped.tp == 0);
    CHECK(flipped.tn == 0);
    CHECK(flipped.fp == 13);
    CHECK(flipped.fn == 7);
}

TEST_CASE("confusion: pixel-loop oracle on random masks") {
    std::mt19937_64 rng(60);
    std::bernoulli_distribution coin(0.3);
    std::vector<int> a(48), b(48);
    for (int i = 0; i < 48; ++i) {
        a[i] = coin(rng);
        b[i] = coin(rng);
    }
    const ConfusionCounts c = confusion(mask_from(a, 6, 8), mask_from(b, 6, 8));
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (int i = 0; i < 48; ++i) {
        if (a[i] && b[i]) ++tp;
        else if (a[i]) ++fp;
        else if (b[i]) ++fn;
        else ++tn;
    }
    CHECK(c.tp == tp);
    CHECK(c.fp == fp);
    CHECK(c.tn == tn);
    CHECK(c.fn == fn);
    CHECK(c.total() == 48);

    CHECK_THROWS_AS(confusion(mask_from(a, 6, 8), mask_from(b, 8, 6)), std::invalid_argument);
}

TEST_CASE("oa_fm_kc: perfect prediction scores 1 everywhere") {
    const CmScores s = oa_fm_kc(ConfusionCounts{10, 0, 30, 0});
    CHECK(s.oa == 1.0);
    CHECK(s.fm == 1.0);
    CHECK(s.kc == 1.0);
    CHECK(!s.fm_degenerate);
    CHECK(!s.kc_degenerate);
}

TEST_CASE("oa_fm_kc: hand-verified case TP=50 FP=10 TN=930 FN=10") {
    const CmScores s = oa_fm_kc(ConfusionCounts{50, 10, 930, 10});
    CHECK(s.oa == doctest::Approx(0.98).epsilon(1e-12));
    // Fm = 100/120; PRE = (60*60 + 940*940)/1000^2 = 0.8872
    CHECK(s.fm == doctest::Approx(100.0 / 120.0).epsilon(1e-12));
    CHECK(s.pre == doctest::Approx(0.8872).epsilon(1e-12));
    CHECK(s.kc == doctest::Approx((0.98 - 0.8872) / (1.0 - 0.8872)).epsilon(1e-12));
    CHECK(s.fm == doctest::Approx(0.8333).epsilon(1e-4));
    CHECK(s.kc == doctest::Approx(0.8227).epsilon(1e-4));
}

TEST_CASE("oa_fm_kc: degenerate cases carry flags") {
    const CmScores all_neg = oa_fm_kc(ConfusionCounts{0, 0, 25, 0});
    CHECK(all_neg.fm == 1.0);
    CHECK(all_neg.fm_degenerate);
    CHECK(all_neg.kc == 0.0);
    CHECK(all_neg.kc_degenerate);

    const CmScores missed = oa_fm_kc(ConfusionCounts{0, 0, 20, 5});
    CHECK(missed.fm == 0.0);
    CHECK(!missed.fm_degenerate);
}

TEST_CASE("oa_fm_kc: one extra false positive never helps") {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<std::uint64_t> count(1, 500);
    for (int trial = 0; trial < 50; ++trial) {
        ConfusionCounts c{count(rng), count(rng), count(rng), count(rng)};
        ConfusionCounts worse = c;
        ++worse.fp;
        --worse.tn;
        if (worse.tn == 0) continue;
        const CmScores s0 = oa_fm_kc(c);
        const CmScores s1 = oa_fm_kc(worse);
        CHECK(s1.oa <= s0.oa + 1e-15);
        CHECK(s1.fm <= s0.fm + 1e-15);
        CHECK(s1.kc <= s0.kc + 1e-15);
    }
}

TEST_CASE("roc_pr_curves: perfect separation has AUR = AUP = 1") {
    std::vector<double> scores{0.9, 0.8, 0.85, 0.1, 0.2, 0.15};
    std::vector<std::uint8_t> labels{1, 1, 1, 0, 0, 0};
    const CurveSet c = roc_pr_curves(scores, labels);
    CHECK(c.aur == doctest::Approx(1.0));
    CHECK(c.aup == doctest::Approx(1.0));
}

TEST_CASE("roc_pr_curves: constant scores give the chance diagonal") {
    std::vector<double> scores(10, 0.5);
    std::vector<std::uint8_t> labels{1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
    const CurveSet c = roc_pr_curves(scores, labels);
    CHECK(c.aur == doctest::Approx(0.5));
    REQUIRE(c.roc.size() == 2);  // origin + single tie group
    CHECK(c.roc[1].fpr == 1.0);
    CHECK(c.roc[1].tpr == 1.0);
}

TEST_CASE("roc_pr_curves: exhaustive-threshold oracle on random scores") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::bernoulli_distribution coin(0.4);
    std::vector<double> scores(30);
    std::vector<std::uint8_t> labels(30);
    int pos = 0;
    for (int i = 0; i < 30; ++i) {
        scores[i] = std::round(uni(rng) * 10.0) / 10.0;  // coarse grid forces ties
        labels[i] = coin(rng) ? 1 : 0;
        pos += labels[i];
    }
    labels[0] = 1;
    labels[1] = 0;

    const CurveSet got = roc_pr_curves(scores, labels);
    const RefCurves want = reference_curves(scores, labels);
    REQUIRE(got.roc.size() == want.roc.size());
    for (std::size_t i = 1; i < want.roc.size(); ++i) {
        CHECK(got.roc[i].threshold == want.roc[i][0]);
        CHECK(got.roc[i].fpr == doctest::Approx(want.roc[i][1]).epsilon(1e-12));
        CHECK(got.roc[i].tpr == doctest::Approx(want.roc[i][2]).epsilon(1e-12));
    }
    REQUIRE(got.pr.size() == want.pr.size());
    for (std::size_t i = 0; i < want.pr.size(); ++i) {
        CHECK(got.pr[i].recall == doctest::Approx(want.pr[i][1]).epsilon(1e-12));
        CHECK(got.pr[i].precision == doctest::Approx(want.pr[i][2]).epsilon(1e-12));
    }
    CHECK(got.aur == doctest::Approx(want.aur).epsilon(1e-12));
    CHECK(got.aup == doctest::Approx(want.aup).epsilon(1e-12));

    // ROC is monotone and the areas live in [0,1]
    for (std::size_t i = 1; i < got.roc.size(); ++i) {
        CHECK(got.roc[i].fpr >= got.roc[i - 1].fpr);
        CHECK(got.roc[i].tpr >= got.roc[i - 1].tpr);
    }
    CHECK(got.aur >= 0.0);
    CHECK(got.aur <= 1.0);
    CHECK(got.aup >= 0.0);
    CHECK(got.aup <= 1.0);
}

TEST_CASE("roc_pr_curves: invariant under strictly increasing transforms") {
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> scores(40), warped(40);
    std::vector<std::uint8_t> labels(40);
    for (int i = 0; i < 40; ++i) {
        scores[i] = uni(rng);
        warped[i] = std::exp(3.0 * scores[i]) - 1.0;
        labels[i] = i % 3 == 0 ? 1 : 0;
    }
    const CurveSet a = roc_pr_curves(scores, labels);
    const CurveSet b = roc_pr_curves(warped, labels);
    CHECK(a.aur == doctest::Approx(b.aur).epsilon(1e-12));
    CHECK(a.aup == doctest::Approx(b.aup).epsilon(1e-12));
}

TEST_CASE("roc_pr_curves: single-class ground truth is an error") {
    std::vector<double> scores{0.1, 0.2};
    CHECK_THROWS_AS(roc_pr_curves(scores, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(roc_pr_curves(scores, {0, 0}), std::invalid_argument);
}

TEST_CASE("curve CSV exports") {
    testsupport::TempDir tmp("vdf-metrics");
    std::vector<double> scores{0.9, 0.1, 0.5, 0.7};
    std::vector<std::uint8_t> labels{1, 0, 0, 1};
    const CurveSet c = roc_pr_curves(scores, labels);
    write_roc_csv(c, tmp.file("roc.csv"));
    write_pr_csv(c, tmp.file("pr.csv"));
    std::ifstream roc(tmp.file("roc.csv")), pr(tmp.file("pr.csv"));
    std::string line;
    std::getline(roc, line);
    CHECK(line == "threshold,fpr,tpr");
    std::getline(pr, line);
    CHECK(line == "threshold,recall,precision");
}
