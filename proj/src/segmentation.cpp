#include "vdf/segmentation.hpp"
#include "vdf/matrix_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace vdf {

SegmentMap SegmentMap::from_labels(int height, int width, std::vector<int> raw_labels) {
    if (raw_labels.size() != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument("SegmentMap: label raster size mismatch");
    SegmentMap seg;
    seg.height = height;
    seg.width = width;
    seg.labels.resize(raw_labels.size());

    std::unordered_map<int, int> compact;
    compact.reserve(256);
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        auto [it, inserted] = compact.try_emplace(raw_labels[i], static_cast<int>(compact.size()));
        seg.labels[i] = it->second;
    }
    seg.segment_count = static_cast<int>(compact.size());
    seg.pixel_lists.assign(seg.segment_count, {});
    for (std::size_t i = 0; i < seg.labels.size(); ++i)
        seg.pixel_lists[seg.labels[i]].push_back(static_cast<int>(i));
    return seg;
}

std::pair<SegmentMap, FeatureMatrix> tile_patches(const RasterImage& img, int patch_size) {
    if (patch_size < 1) throw std::invalid_argument("tile_patches: patch size must be >= 1");
    if (patch_size > img.height && patch_size > img.width)
        throw std::invalid_argument("tile_patches: patch size exceeds both image dimensions");

    const int rows = std::max(1, img.height / patch_size);
    const int cols = std::max(1, img.width / patch_size);

    std::vector<int> labels(img.pixel_count());
    for (int r = 0; r < img.height; ++r) {
        const int pr = std::min(r / patch_size, rows - 1);  // remainder absorbed into last row
        for (int c = 0; c < img.width; ++c) {
            const int pc = std::min(c / patch_size, cols - 1);
            labels[static_cast<std::size_t>(r) * img.width + c] = pr * cols + pc;
        }
    }
    SegmentMap seg = SegmentMap::from_labels(img.height, img.width, std::move(labels));

    // Feature row = vectorized p*p*C window at the patch grid origin,
    // coordinates clamped for images thinner than one patch.
    const int fdim = patch_size * patch_size * img.channels;
    FeatureMatrix features(seg.segment_count, fdim);
    for (int pr = 0; pr < rows; ++pr) {
        for (int pc = 0; pc < cols; ++pc) {
            const int id = pr * cols + pc;
            int col = 0;
            for (int dr = 0; dr < patch_size; ++dr) {
                const int r = std::min(pr * patch_size + dr, img.height - 1);
                for (int dc = 0; dc < patch_size; ++dc) {
                    const int c = std::min(pc * patch_size + dc, img.width - 1);
                    for (int k = 0; k < img.channels; ++k)
                        features(id, col++) = img.at(r, c, k);
                }
            }
        }
    }
    return {std::move(seg), std::move(features)};
}

SegmentMap cosegment_intersect(const SegmentMap& a, const SegmentMap& b, int min_size) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("cosegment_intersect: dimension mismatch");
    if (min_size < 1) min_size = 1;

    const std::size_t npix = a.labels.size();
    std::vector<int> labels(npix);
    {
        std::unordered_map<std::int64_t, int> pair_ids;
        pair_ids.reserve(static_cast<std::size_t>(a.segment_count) + b.segment_count);
        for (std::size_t i = 0; i < npix; ++i) {
            const std::int64_t key =
                static_cast<std::int64_t>(a.labels[i]) * b.segment_count + b.labels[i];
            auto [it, inserted] = pair_ids.try_emplace(key, static_cast<int>(pair_ids.size()));
            labels[i] = it->second;
        }
    }

    // Merge fragments below min_size into the adjacent segment sharing the
    // longest boundary (ties to the smaller label), smallest fragments first.
    const int height = a.height, width = a.width;
    int n_labels = 1 + *std::max_element(labels.begin(), labels.end());
    std::vector<std::int64_t> sizes(n_labels, 0);
    for (int l : labels) ++sizes[l];

    std::vector<int> order(n_labels);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return sizes[x] != sizes[y] ? sizes[x] < sizes[y] : x < y;
    });

    std::vector<std::vector<int>> members(n_labels);
    for (std::size_t i = 0; i < npix; ++i) members[labels[i]].push_back(static_cast<int>(i));

    for (int frag : order) {
        if (sizes[frag] == 0 || sizes[frag] >= min_size) continue;
        // Boundary length to each adjacent label, counted over 4-neighbor pairs.
        std::map<int, std::int64_t> boundary;
        for (int p : members[frag]) {
            const int r = p / width, c = p % width;
            const int nb[4] = {r > 0 ? p - width : -1, r + 1 < height ? p + width : -1,
                               c > 0 ? p - 1 : -1, c + 1 < width ? p + 1 : -1};
            for (int q : nb)
                if (q >= 0 && labels[q] != frag) ++boundary[labels[q]];
        }
        if (boundary.empty()) continue;  // fragment is the whole image
        int best = -1;
        std::int64_t best_len = -1;
        for (const auto& [lab, len] : boundary) {
            if (len > best_len) {
                best = lab;
                best_len = len;
            }
        }
        for (int p : members[frag]) labels[p] = best;
        members[best].insert(members[best].end(), members[frag].begin(), members[frag].end());
        sizes[best] += sizes[frag];
        sizes[frag] = 0;
        members[frag].clear();
    }

    return SegmentMap::from_labels(height, width, std::move(labels));
}

FeatureMatrix extract_features(const RasterImage& img, const SegmentMap& seg) {
    if (seg.height != img.height || seg.width != img.width)
        throw std::invalid_argument("extract_features: segmentation does not cover the image");

    const int channels = img.channels;
    FeatureMatrix features(seg.segment_count, 3 * channels);
    std::vector<double> vals;
    for (int i = 0; i < seg.segment_count; ++i) {
        const auto& pixels = seg.pixel_lists[i];
        for (int k = 0; k < channels; ++k) {
            vals.clear();
            vals.reserve(pixels.size());
            double sum = 0.0;
            for (int p : pixels) {
                const double v = img.data[static_cast<std::size_t>(p) * channels + k];
                vals.push_back(v);
                sum += v;
            }
            const double mean = sum / static_cast<double>(vals.size());
            std::sort(vals.begin(), vals.end());
            const std::size_t mid = vals.size() / 2;
            const double median = (vals.size() % 2 == 1)
                                      ? vals[mid]
                                      : 0.5 * (vals[mid - 1] + vals[mid]);
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            const double variance = ss / static_cast<double>(vals.size());  // population
            features(i, 3 * k + 0) = mean;
            features(i, 3 * k + 1) = median;
            features(i, 3 * k + 2) = variance;
        }
    }
    return features;
}

void write_segment_labels(const SegmentMap& seg, const std::string& path) {
    std::vector<std::int32_t> vals(seg.labels.begin(), seg.labels.end());
    write_label_matrix(path, seg.height, seg.width, vals.data());
}

SegmentMap read_segment_labels(const std::string& path) {
    const LabelMatrixFile m = read_label_matrix(path);
    std::vector<int> labels(m.values.begin(), m.values.end());
    return SegmentMap::from_labels(m.rows, m.cols, std::move(labels));
}

} // namespace vdf
