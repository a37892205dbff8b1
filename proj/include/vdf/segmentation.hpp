#pragma once

#include "vdf/image.hpp"

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace vdf {

/// One feature row per graph vertex (patch or superpixel).
using FeatureMatrix = Eigen::MatrixXd;

/// Partition of the image plane into segments 0..segment_count-1.
/// Every pixel carries exactly one label; every segment is nonempty.
struct SegmentMap {
    int height = 0;
    int width = 0;
    int segment_count = 0;
    std::vector<int> labels;                    // per pixel, row-major
    std::vector<std::vector<int>> pixel_lists;  // linear pixel indices per segment

    int label_at(int r, int c) const { return labels[static_cast<std::size_t>(r) * width + c]; }

    /// Builds a SegmentMap from raw labels, compacting them to 0..N-1 in
    /// order of first appearance (raster scan) and indexing pixel lists.
    static SegmentMap from_labels(int height, int width, std::vector<int> raw_labels);
};

/// Splits the image into a grid of p-by-p patches; remainder rows/columns are
/// absorbed into the last patch row/column. Each feature row is the
/// vectorized p*p*C window anchored at the patch's grid origin (coordinates
/// clamped to the image for images thinner than p).
/// Throws std::invalid_argument if p < 1 or p exceeds both image dimensions.
std::pair<SegmentMap, FeatureMatrix> tile_patches(const RasterImage& img, int patch_size);

/// SLIC superpixels: k-means in (color, position) space with distance
/// d = d_color + (compactness/S) * d_xy, grid-initialized centers at spacing
/// S = sqrt(H*W/target_n), a fixed iteration count, then connectivity
/// enforcement (orphan components merged into the largest adjacent segment).
/// The compactness default is calibrated to [0,1]-normalized colors; larger
/// values trade boundary adherence for squarer segments.
SegmentMap slic_segment(const RasterImage& img, int target_n, double compactness = 0.3,
                        int iterations = 10);

/// Intersects two segmentations: each output segment is a nonempty set of
/// pixels sharing an (a-label, b-label) pair. Fragments smaller than min_size
/// are merged into the adjacent segment sharing the longest boundary.
SegmentMap cosegment_intersect(const SegmentMap& a, const SegmentMap& b, int min_size = 25);

/// Per-segment statistics: row i concatenates (mean, median, population
/// variance) of the pixels in segment i, per channel; M_f = 3*C.
/// The median of an even-sized sample is the mean of the two central values.
FeatureMatrix extract_features(const RasterImage& img, const SegmentMap& seg);

/// Label raster serialization via the ".imat" sidecar format.
void write_segment_labels(const SegmentMap& seg, const std::string& path);
SegmentMap read_segment_labels(const std::string& path);

} // namespace vdf
