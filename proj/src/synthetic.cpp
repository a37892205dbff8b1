#include "vdf/synthetic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace vdf {

namespace {

using Rng = std::mt19937_64;

// min/max ratio of pairwise distances: 1 means perfectly equidistant means.
double pair_spread_ratio(const std::vector<std::vector<double>>& means) {
    const int n = static_cast<int>(means.size());
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = 0.0;
            for (std::size_t c = 0; c < means[i].size(); ++c)
                d += (means[i][c] - means[j][c]) * (means[i][c] - means[j][c]);
            d = std::sqrt(d);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    return hi > 0.0 ? lo / hi : 0.0;
}

// Spread class means across [0.15, 0.85] with an independent permutation per
// channel, plus jitter small enough to keep the ordering. Multi-channel
// tables are redrawn toward near-uniform pairwise separations: a single
// extreme class pair would otherwise dominate every normalized change score.
// The 0.15 margin leaves ~3 sigma of headroom before clamping at default
// noise.
std::vector<std::vector<double>> spread_means(int n_classes, int channels, Rng& rng) {
    const double span = 0.7;
    const double step = n_classes > 1 ? span / (n_classes - 1) : 0.0;
    std::uniform_real_distribution<double> jitter(-0.2 * step, 0.2 * step);
    std::vector<int> perm(n_classes);

    std::vector<std::vector<double>> best;
    double best_ratio = -1.0;
    const int draws = channels > 1 ? 60 : 1;
    for (int draw = 0; draw < draws; ++draw) {
        std::vector<std::vector<double>> means(n_classes, std::vector<double>(channels));
        for (int c = 0; c < channels; ++c) {
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            for (int k = 0; k < n_classes; ++k)
                means[k][c] = 0.15 + step * perm[k] + (n_classes > 1 ? jitter(rng) : 0.0);
        }
        const double ratio = pair_spread_ratio(means);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = std::move(means);
        }
        if (best_ratio >= 0.5) break;
    }
    return best;
}

// Modality B mapping: per-channel permutations of the A-mean values, rotated
// by a random orthogonal matrix and squashed monotonically back into
// [0.15, 0.85]. Redrawn toward near-uniform pairwise separations like the A
// table. Intensities stay incomparable across modalities; only the class
// partition is shared.
std::vector<std::vector<double>> derive_b_means(const std::vector<std::vector<double>>& a_means,
                                                int channels_b, Rng& rng) {
    const int n_classes = static_cast<int>(a_means.size());
    const int channels_a = static_cast<int>(a_means[0].size());
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<int> perm(n_classes);

    std::vector<std::vector<double>> best;
    double best_ratio = -1.0;
    for (int draw = 0; draw < 60; ++draw) {
        Eigen::MatrixXd permuted(n_classes, channels_b);
        for (int c = 0; c < channels_b; ++c) {
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            for (int k = 0; k < n_classes; ++k)
                permuted(k, c) = a_means[perm[k]][c % channels_a];
        }

        Eigen::MatrixXd seed_mat(channels_b, channels_b);
        for (int r = 0; r < channels_b; ++r)
            for (int c = 0; c < channels_b; ++c) seed_mat(r, c) = gauss(rng);
        const Eigen::MatrixXd rotation =
            Eigen::HouseholderQR<Eigen::MatrixXd>(seed_mat).householderQ();

        Eigen::MatrixXd mixed = permuted * rotation.transpose();
        for (int c = 0; c < channels_b; ++c) {
            const double lo = mixed.col(c).minCoeff();
            const double hi = mixed.col(c).maxCoeff();
            for (int k = 0; k < n_classes; ++k) {
                double t = hi > lo ? (mixed(k, c) - lo) / (hi - lo) : 0.5;
                t = std::pow(t, 0.8);  // monotone warp
                mixed(k, c) = 0.15 + 0.7 * t;
            }
        }

        std::vector<std::vector<double>> means(n_classes, std::vector<double>(channels_b));
        for (int k = 0; k < n_classes; ++k)
            for (int c = 0; c < channels_b; ++c) means[k][c] = mixed(k, c);
        const double ratio = pair_spread_ratio(means);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = std::move(means);
        }
        if (best_ratio >= 0.5) break;
    }
    return best;
}

std::vector<int> voronoi_class_map(const SceneSpec& spec, Rng& rng) {
    const int height = spec.height, width = spec.width;
    // Chunky cells: regions comparable to the change-region scale, so single
    // land-cover patches are big enough to host an event.
    const int n_sites = std::max(spec.n_classes * 2,
                                 static_cast<int>(static_cast<std::int64_t>(height) * width / 3500));
    std::uniform_int_distribution<int> row_dist(0, height - 1);
    std::uniform_int_distribution<int> col_dist(0, width - 1);
    std::uniform_int_distribution<int> class_dist(0, spec.n_classes - 1);

    std::vector<int> site_r(n_sites), site_c(n_sites), site_class(n_sites);
    for (int s = 0; s < n_sites; ++s) {
        site_r[s] = row_dist(rng);
        site_c[s] = col_dist(rng);
        // first sites cover every class so none goes missing
        site_class[s] = s < spec.n_classes ? s : class_dist(rng);
    }

    std::vector<int> labels(static_cast<std::size_t>(height) * width);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            int best = 0;
            std::int64_t best_d = std::numeric_limits<std::int64_t>::max();
            for (int s = 0; s < n_sites; ++s) {
                const std::int64_t dr = r - site_r[s], dc = c - site_c[s];
                const std::int64_t d = dr * dr + dc * dc;
                if (d < best_d) {
                    best_d = d;
                    best = s;
                }
            }
            labels[static_cast<std::size_t>(r) * width + c] = site_class[best];
        }
    }

    // Two majority-vote passes knock off pixel-scale jags.
    std::vector<int> votes(spec.n_classes);
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<int> smoothed = labels;
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                std::fill(votes.begin(), votes.end(), 0);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = std::clamp(r + dr, 0, height - 1);
                        const int cc = std::clamp(c + dc, 0, width - 1);
                        ++votes[labels[static_cast<std::size_t>(rr) * width + cc]];
                    }
                }
                const std::size_t p = static_cast<std::size_t>(r) * width + c;
                int winner = labels[p];
                for (int k = 0; k < spec.n_classes; ++k)
                    if (votes[k] > votes[winner]) winner = k;
                smoothed[p] = winner;
            }
        }
        labels = std::move(smoothed);
    }
    return labels;
}

// Compact connected blob of `target` pixels grown breadth-first over the
// allowed mask. Returns an empty vector when the component is too small.
std::vector<std::uint8_t> grow_region(int height, int width, std::size_t target, int start,
                                      const std::vector<std::uint8_t>& allowed) {
    std::vector<std::uint8_t> region(static_cast<std::size_t>(height) * width, 0);
    std::deque<int> frontier{start};
    region[start] = 1;
    std::size_t count = 1;
    while (count < target && !frontier.empty()) {
        const int p = frontier.front();
        frontier.pop_front();
        const int r = p / width, c = p % width;
        const int nb[4] = {r > 0 ? p - width : -1, r + 1 < height ? p + width : -1,
                           c > 0 ? p - 1 : -1, c + 1 < width ? p + 1 : -1};
        for (int q : nb) {
            if (q < 0 || region[q] || !allowed[q]) continue;
            region[q] = 1;
            frontier.push_back(q);
            if (++count == target) break;
        }
    }
    if (count < target) region.clear();
    return region;
}

// The region is relabeled to a class that already exists elsewhere in the
// scene; otherwise the post-event graph would give the changed vertices no
// unchanged same-class neighbors and the forward level would go blind. The
// blob grows over pixels that neither carry the target class nor touch it,
// so every region pixel genuinely changes and the region never borders its
// own class. Pixels whose class sits too close to the target class in either
// mean table are excluded as well: real benchmark events (floods, fires,
// construction) replace land cover with something of clearly different
// appearance, and a near-zero-contrast "change" would be undetectable by
// construction, not by algorithmic failure.
struct ChangePlan {
    std::vector<std::uint8_t> region;
    int new_class = -1;
};

double pair_distance(const std::vector<std::vector<double>>& means, int a, int b) {
    double d = 0.0;
    for (std::size_t c = 0; c < means[a].size(); ++c)
        d += (means[a][c] - means[b][c]) * (means[a][c] - means[b][c]);
    return std::sqrt(d);
}

ChangePlan plan_change(const std::vector<int>& classes, int height, int width, int n_classes,
                       std::size_t target, const std::vector<std::vector<double>>& a_means,
                       const std::vector<std::vector<double>>& b_means, Rng& rng) {
    ChangePlan plan;
    if (target == 0) {
        plan.region.assign(classes.size(), 0);
        plan.new_class = 0;
        return plan;
    }

    double max_a = 0.0, max_b = 0.0;
    for (int i = 0; i < n_classes; ++i)
        for (int j = i + 1; j < n_classes; ++j) {
            max_a = std::max(max_a, pair_distance(a_means, i, j));
            max_b = std::max(max_b, pair_distance(b_means, i, j));
        }

    // Prefer abundant classes: the unchanged remainder of the target class is
    // the reference population both detection directions compare against, so
    // it should outweigh the region (floods make water, not the reverse).
    std::vector<std::int64_t> class_pixels(n_classes, 0);
    for (int c : classes) ++class_pixels[c];
    std::vector<int> class_order(n_classes);
    std::iota(class_order.begin(), class_order.end(), 0);
    std::sort(class_order.begin(), class_order.end(), [&](int p, int q) {
        return class_pixels[p] != class_pixels[q] ? class_pixels[p] > class_pixels[q] : p < q;
    });
    std::uniform_int_distribution<int> pick(0, static_cast<int>(classes.size()) - 1);

    // Strongest scenario first: the whole region inside one contrastive
    // land-cover patch (an event hits one cover type); fall back to
    // multi-class regions and then to relaxed contrast margins.
    for (const double margin : {0.5, 0.25, 0.0}) {
        for (const bool single_class : {true, false}) {
            for (int cand : class_order) {
                // The unchanged remainder of the target class must clearly
                // outweigh the region, or change-side vertices dominate the
                // class's neighborhoods and every unchanged member reads as
                // contaminated.
                if (margin > 0.0 &&
                    class_pixels[cand] < static_cast<std::int64_t>(2.5 * target))
                    continue;
                std::vector<std::uint8_t> contrastive(n_classes, 0);
                for (int c = 0; c < n_classes; ++c)
                    contrastive[c] = c != cand &&
                                     pair_distance(a_means, c, cand) >= margin * max_a &&
                                     pair_distance(b_means, c, cand) >= margin * max_b;

                std::vector<std::uint8_t> admissible(classes.size(), 0);
                for (std::size_t p = 0; p < classes.size(); ++p) {
                    if (!contrastive[classes[p]]) continue;
                    const int r = static_cast<int>(p) / width, c = static_cast<int>(p) % width;
                    bool touches = false;
                    const int nb[4] = {r > 0 ? static_cast<int>(p) - width : -1,
                                       r + 1 < height ? static_cast<int>(p) + width : -1,
                                       c > 0 ? static_cast<int>(p) - 1 : -1,
                                       c + 1 < width ? static_cast<int>(p) + 1 : -1};
                    for (int q : nb) touches = touches || (q >= 0 && classes[q] == cand);
                    admissible[p] = touches ? 0 : 1;
                }

                for (int attempt = 0; attempt < 32; ++attempt) {
                    const int start = pick(rng);
                    if (!admissible[start]) continue;
                    std::vector<std::uint8_t> allowed = admissible;
                    if (single_class) {
                        const int host = classes[start];
                        for (std::size_t p = 0; p < classes.size(); ++p)
                            if (classes[p] != host) allowed[p] = 0;
                    }
                    std::vector<std::uint8_t> region =
                        grow_region(height, width, target, start, allowed);
                    if (!region.empty()) {
                        plan.region = std::move(region);
                        plan.new_class = cand;
                        return plan;
                    }
                }
            }
        }
    }
    throw std::runtime_error("generate_pair: cannot place a connected change region of the "
                             "requested size");
}

// Per-pixel micro-texture shared by both renders: the same physical ground
// detail seen by both sensors. It is what makes the image structure
// modality-invariant beyond the bare class layout; without it the two
// modalities' intra-class orderings would be pure independent noise, which
// no structure comparison could reconcile.
std::vector<double> shared_texture(int height, int width, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> texture(static_cast<std::size_t>(height) * width);
    for (double& v : texture) v = gauss(rng);
    return texture;
}

RasterImage render(const std::vector<int>& labels,
                   const std::vector<std::vector<double>>& means, int height, int width,
                   int channels, double sigma, const std::vector<double>& texture,
                   double texture_gain, Rng& rng) {
    RasterImage img(height, width, channels);
    std::normal_distribution<double> noise(0.0, sigma);
    for (std::size_t p = 0; p < labels.size(); ++p) {
        const auto& mean = means[labels[p]];
        const double detail = texture_gain * texture[p];
        for (int c = 0; c < channels; ++c) {
            double v = mean[c] + detail + (sigma > 0.0 ? noise(rng) : 0.0);
            img.data[p * channels + c] = std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

} // namespace

SyntheticScene generate_pair(const SceneSpec& spec) {
    if (spec.height < 1 || spec.width < 1) throw std::invalid_argument("generate_pair: empty scene");
    if (spec.n_classes < 2) throw std::invalid_argument("generate_pair: need at least two classes");
    if (!(spec.change_fraction >= 0.0 && spec.change_fraction < 0.5))
        throw std::invalid_argument("generate_pair: change fraction must lie in [0, 0.5)");
    if (spec.noise_sigma < 0.0) throw std::invalid_argument("generate_pair: negative noise");
    if (spec.modality_a_channels < 1 || spec.modality_b_channels < 1)
        throw std::invalid_argument("generate_pair: channel counts must be >= 1");

    Rng rng(spec.seed);

    SyntheticScene scene;
    scene.class_map_pre = voronoi_class_map(spec, rng);

    const auto a_means = spread_means(spec.n_classes, spec.modality_a_channels, rng);
    const auto b_means = derive_b_means(a_means, spec.modality_b_channels, rng);

    const std::size_t npix = static_cast<std::size_t>(spec.height) * spec.width;
    const std::size_t target =
        static_cast<std::size_t>(std::llround(spec.change_fraction * static_cast<double>(npix)));
    const ChangePlan plan = plan_change(scene.class_map_pre, spec.height, spec.width,
                                        spec.n_classes, target, a_means, b_means, rng);

    scene.class_map_post = scene.class_map_pre;
    scene.ground_truth = BinaryMask(spec.height, spec.width);
    for (std::size_t p = 0; p < npix; ++p) {
        if (target > 0 && plan.region[p]) {
            scene.class_map_post[p] = plan.new_class;
            scene.ground_truth.values[p] = 1;
        }
    }

    const std::vector<double> texture = shared_texture(spec.height, spec.width, rng);
    const double texture_gain = 1.5 * spec.noise_sigma;
    scene.image_a = render(scene.class_map_pre, a_means, spec.height, spec.width,
                           spec.modality_a_channels, spec.noise_sigma, texture, texture_gain, rng);
    scene.image_b = render(scene.class_map_post, b_means, spec.height, spec.width,
                           spec.modality_b_channels, spec.noise_sigma, texture, texture_gain, rng);
    return scene;
}

} // namespace vdf
