#include "vdf/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vdf {

namespace {

struct Center {
    std::vector<double> color;
    double row = 0.0;
    double col = 0.0;
};

// 4-connected components of equal labels, in raster order of first pixel.
std::vector<std::vector<int>> components_of(const std::vector<int>& labels, int height,
                                            int width, std::vector<int>& comp_of_pixel) {
    comp_of_pixel.assign(labels.size(), -1);
    std::vector<std::vector<int>> members;
    std::vector<int> stack;
    for (std::size_t start = 0; start < labels.size(); ++start) {
        if (comp_of_pixel[start] >= 0) continue;
        const int id = static_cast<int>(members.size());
        members.emplace_back();
        stack.push_back(static_cast<int>(start));
        comp_of_pixel[start] = id;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            members[id].push_back(p);
            const int r = p / width, c = p % width;
            const int nb[4] = {r > 0 ? p - width : -1, r + 1 < height ? p + width : -1,
                               c > 0 ? p - 1 : -1, c + 1 < width ? p + 1 : -1};
            for (int q : nb) {
                if (q >= 0 && comp_of_pixel[q] < 0 && labels[q] == labels[p]) {
                    comp_of_pixel[q] = id;
                    stack.push_back(q);
                }
            }
        }
    }
    return members;
}

// Orphan components (everything but the largest component of each label) are
// merged into the adjacent segment with the most pixels.
void enforce_connectivity(std::vector<int>& labels, int height, int width) {
    std::vector<int> comp_of_pixel;
    const auto members = components_of(labels, height, width, comp_of_pixel);

    const int n_labels = 1 + *std::max_element(labels.begin(), labels.end());
    std::vector<int> canonical(n_labels, -1);
    for (int id = 0; id < static_cast<int>(members.size()); ++id) {
        const int lab = labels[members[id].front()];
        if (canonical[lab] < 0 || members[id].size() > members[canonical[lab]].size())
            canonical[lab] = id;
    }

    std::vector<std::int64_t> label_sizes(n_labels, 0);
    for (int l : labels) ++label_sizes[l];

    for (int id = 0; id < static_cast<int>(members.size()); ++id) {
        const int lab = labels[members[id].front()];
        if (canonical[lab] == id) continue;
        // Pick the adjacent label with the largest current pixel count.
        int best = -1;
        std::int64_t best_size = -1;
        for (int p : members[id]) {
            const int r = p / width, c = p % width;
            const int nb[4] = {r > 0 ? p - width : -1, r + 1 < height ? p + width : -1,
                               c > 0 ? p - 1 : -1, c + 1 < width ? p + 1 : -1};
            for (int q : nb) {
                if (q < 0 || labels[q] == lab) continue;
                const int cand = labels[q];
                if (label_sizes[cand] > best_size ||
                    (label_sizes[cand] == best_size && cand < best)) {
                    best = cand;
                    best_size = label_sizes[cand];
                }
            }
        }
        if (best < 0) continue;  // no neighbor of another label
        for (int p : members[id]) labels[p] = best;
        label_sizes[best] += static_cast<std::int64_t>(members[id].size());
        label_sizes[lab] -= static_cast<std::int64_t>(members[id].size());
    }
}

} // namespace

SegmentMap slic_segment(const RasterImage& img, int target_n, double compactness,
                        int iterations) {
    if (target_n < 1) throw std::invalid_argument("slic_segment: target_n must be >= 1");
    if (compactness <= 0.0) throw std::invalid_argument("slic_segment: compactness must be > 0");
    const int height = img.height, width = img.width, channels = img.channels;
    const std::size_t npix = img.pixel_count();
    if (static_cast<std::size_t>(target_n) > npix)
        throw std::invalid_argument("slic_segment: target_n exceeds pixel count");

    const double spacing = std::sqrt(static_cast<double>(npix) / target_n);
    const int grid_rows = std::max(1, static_cast<int>(std::lround(height / spacing)));
    const int grid_cols = std::max(1, static_cast<int>(std::lround(width / spacing)));

    std::vector<Center> centers;
    centers.reserve(static_cast<std::size_t>(grid_rows) * grid_cols);
    for (int gr = 0; gr < grid_rows; ++gr) {
        for (int gc = 0; gc < grid_cols; ++gc) {
            Center ctr;
            ctr.row = (gr + 0.5) * height / grid_rows - 0.5;
            ctr.col = (gc + 0.5) * width / grid_cols - 0.5;
            const int pr = std::clamp(static_cast<int>(std::lround(ctr.row)), 0, height - 1);
            const int pc = std::clamp(static_cast<int>(std::lround(ctr.col)), 0, width - 1);
            ctr.color.resize(channels);
            for (int k = 0; k < channels; ++k) ctr.color[k] = img.at(pr, pc, k);
            centers.push_back(std::move(ctr));
        }
    }

    const double spatial_scale = compactness / spacing;
    std::vector<int> labels(npix, 0);
    std::vector<double> best(npix);

    for (int it = 0; it < iterations; ++it) {
        std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
        for (int ci = 0; ci < static_cast<int>(centers.size()); ++ci) {
            const Center& ctr = centers[ci];
            const int r0 = std::max(0, static_cast<int>(std::floor(ctr.row - spacing)));
            const int r1 = std::min(height - 1, static_cast<int>(std::ceil(ctr.row + spacing)));
            const int c0 = std::max(0, static_cast<int>(std::floor(ctr.col - spacing)));
            const int c1 = std::min(width - 1, static_cast<int>(std::ceil(ctr.col + spacing)));
            for (int r = r0; r <= r1; ++r) {
                for (int c = c0; c <= c1; ++c) {
                    const std::size_t p = static_cast<std::size_t>(r) * width + c;
                    double dc2 = 0.0;
                    for (int k = 0; k < channels; ++k) {
                        const double d = img.data[p * channels + k] - ctr.color[k];
                        dc2 += d * d;
                    }
                    const double dr = r - ctr.row, dcc = c - ctr.col;
                    const double d = std::sqrt(dc2) +
                                     spatial_scale * std::sqrt(dr * dr + dcc * dcc);
                    if (d < best[p]) {  // ties keep the lower center index
                        best[p] = d;
                        labels[p] = ci;
                    }
                }
            }
        }

        // Some pixels can fall outside every search window; take nearest center.
        for (std::size_t p = 0; p < npix; ++p) {
            if (std::isfinite(best[p])) continue;
            const int r = static_cast<int>(p) / width, c = static_cast<int>(p) % width;
            double nearest = std::numeric_limits<double>::infinity();
            for (int ci = 0; ci < static_cast<int>(centers.size()); ++ci) {
                const double dr = r - centers[ci].row, dcc = c - centers[ci].col;
                const double d = dr * dr + dcc * dcc;
                if (d < nearest) {
                    nearest = d;
                    labels[p] = ci;
                }
            }
        }

        std::vector<std::vector<double>> acc(centers.size(),
                                             std::vector<double>(channels + 3, 0.0));
        for (std::size_t p = 0; p < npix; ++p) {
            auto& a = acc[labels[p]];
            for (int k = 0; k < channels; ++k) a[k] += img.data[p * channels + k];
            a[channels] += static_cast<double>(p / width);
            a[channels + 1] += static_cast<double>(p % width);
            a[channels + 2] += 1.0;
        }
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
            const double count = acc[ci][channels + 2];
            if (count == 0.0) continue;  // empty center keeps its position
            for (int k = 0; k < channels; ++k) centers[ci].color[k] = acc[ci][k] / count;
            centers[ci].row = acc[ci][channels] / count;
            centers[ci].col = acc[ci][channels + 1] / count;
        }
    }

    enforce_connectivity(labels, height, width);
    return SegmentMap::from_labels(height, width, std::move(labels));
}

} // namespace vdf
