#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vdf {

/// Multichannel raster with interleaved row-major storage (row, col, channel).
/// Values are real; loaders scale integer samples so data lies in [0,1].
struct RasterImage {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    RasterImage() = default;
    RasterImage(int h, int w, int c)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, 0.0) {}

    double& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
};

/// Per-pixel boolean mask; nonzero means "changed".
struct BinaryMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> values;

    BinaryMask() = default;
    BinaryMask(int h, int w)
        : height(h), width(w), values(static_cast<std::size_t>(h) * w, 0) {}

    std::uint8_t& at(int r, int c) { return values[static_cast<std::size_t>(r) * width + c]; }
    std::uint8_t at(int r, int c) const { return values[static_cast<std::size_t>(r) * width + c]; }
    std::size_t pixel_count() const { return values.size(); }
};

/// Reads an 8/16-bit grayscale or RGB PNG/TIFF, or a ".fmat" float sidecar.
/// Integer samples are scaled to [0,1] by the format's max sample value;
/// sidecar values are taken as-is. Throws std::runtime_error on unreadable
/// files and unsupported depth or channel layouts.
RasterImage load_image(const std::string& path);

/// Writes PNG/TIFF (8-bit, values quantized as round(v*255)) or a ".fmat"
/// sidecar (full precision). Channel order in files is RGB.
void write_image(const RasterImage& img, const std::string& path);

/// Per-channel affine rescale to [0,1]; constant channels map to all-zeros.
RasterImage normalize_channels(const RasterImage& img);

/// Keeps the listed bands (0-based), in the given order. Out-of-range
/// indices throw std::invalid_argument.
RasterImage select_channels(const RasterImage& img, const std::vector<int>& bands);

/// Loads a PNG/TIFF as a mask: any nonzero sample marks the pixel changed.
BinaryMask load_mask(const std::string& path);

/// Writes a mask as an 8-bit grayscale PNG (0 / 255).
void write_mask(const BinaryMask& mask, const std::string& path);

/// Color-coded change map against ground truth:
/// TP white (255,255,255), FP red (255,0,0), TN black (0,0,0), FN green (0,255,0).
void write_change_map(const BinaryMask& cm, const BinaryMask& gt, const std::string& path);

/// Grayscale export of a score field: min-max scaled to [0,1], 8-bit quantized.
/// Expects a single-channel image.
void write_score_png(const RasterImage& scores, const std::string& path);

} // namespace vdf
