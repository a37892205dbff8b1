#pragma once

#include "vdf/image.hpp"

#include <cstdint>
#include <vector>

namespace vdf {

/// Recipe for a synthetic heterogeneous pair with exact ground truth.
struct SceneSpec {
    int height = 200;
    int width = 200;
    int n_classes = 6;
    std::uint64_t seed = 0;
    double change_fraction = 0.1;  // must stay below 0.5 (sparse-change prior)
    double noise_sigma = 0.05;
    int modality_a_channels = 1;
    int modality_b_channels = 3;
};

struct SyntheticScene {
    RasterImage image_a;
    RasterImage image_b;
    BinaryMask ground_truth;
    std::vector<int> class_map_pre;   // per pixel
    std::vector<int> class_map_post;  // change region relabeled to a fresh class
};

/// Builds a piecewise-constant class map (Voronoi cells over random sites,
/// majority-smoothed), renders modality A from per-class mean vectors plus
/// Gaussian noise, grows one connected change region of ~change_fraction of
/// the pixels (relabeled to a class that also occurs elsewhere, so both
/// detection directions have unchanged reference vertices), and renders
/// modality B from an unrelated mapping: permuted class means cycled into
/// the B channel count, rotated by a random orthogonal matrix, and passed
/// through a monotone per-channel nonlinearity. Intensities share no direct
/// relation across modalities; only the class structure is common.
SyntheticScene generate_pair(const SceneSpec& spec);

} // namespace vdf
