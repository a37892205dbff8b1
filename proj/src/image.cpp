#include "vdf/image.hpp"
#include "vdf/matrix_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vdf {

namespace {

bool has_suffix(const std::string& s, const std::string& suf) {
    if (s.size() < suf.size()) return false;
    return std::equal(suf.rbegin(), suf.rend(), s.rbegin(),
                      [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

bool is_sidecar(const std::string& path) { return has_suffix(path, ".fmat"); }

RasterImage from_cv(const cv::Mat& mat, const std::string& path) {
    if (mat.empty()) throw std::runtime_error("unreadable image: " + path);
    const int ch = mat.channels();
    if (ch != 1 && ch != 3)
        throw std::runtime_error("unsupported channel count (" + std::to_string(ch) + "): " + path);

    double scale = 0.0;
    switch (mat.depth()) {
        case CV_8U: scale = 255.0; break;
        case CV_16U: scale = 65535.0; break;
        default: throw std::runtime_error("unsupported bit depth (want 8/16-bit): " + path);
    }

    RasterImage img(mat.rows, mat.cols, ch);
    for (int r = 0; r < mat.rows; ++r) {
        for (int c = 0; c < mat.cols; ++c) {
            for (int k = 0; k < ch; ++k) {
                // OpenCV stores color as BGR; flip to RGB.
                const int src_k = (ch == 3) ? 2 - k : k;
                const double v = (mat.depth() == CV_8U)
                                     ? mat.ptr<std::uint8_t>(r)[c * ch + src_k]
                                     : mat.ptr<std::uint16_t>(r)[c * ch + src_k];
                img.at(r, c, k) = v / scale;
            }
        }
    }
    return img;
}

cv::Mat to_cv_8bit(const RasterImage& img) {
    if (img.channels != 1 && img.channels != 3)
        throw std::runtime_error("PNG/TIFF export supports 1 or 3 channels, got " +
                                 std::to_string(img.channels));
    cv::Mat mat(img.height, img.width, img.channels == 1 ? CV_8UC1 : CV_8UC3);
    for (int r = 0; r < img.height; ++r) {
        auto* row = mat.ptr<std::uint8_t>(r);
        for (int c = 0; c < img.width; ++c) {
            for (int k = 0; k < img.channels; ++k) {
                const int dst_k = (img.channels == 3) ? 2 - k : k;
                const double v = std::clamp(img.at(r, c, k), 0.0, 1.0);
                row[c * img.channels + dst_k] = static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
        }
    }
    return mat;
}

} // namespace

RasterImage load_image(const std::string& path) {
    if (is_sidecar(path)) {
        const FloatMatrixFile m = read_float_matrix(path);
        RasterImage img(m.rows, m.cols, m.channels);
        img.data = m.values;
        return img;
    }
    cv::Mat mat = cv::imread(path, cv::IMREAD_UNCHANGED);
    RasterImage img = from_cv(mat, path);
    if (img.pixel_count() == 0) throw std::runtime_error("zero-sized image: " + path);
    return img;
}

void write_image(const RasterImage& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("write_image: empty image");
    if (is_sidecar(path)) {
        write_float_matrix(path, img.height, img.width, img.channels, img.data.data());
        return;
    }
    if (!cv::imwrite(path, to_cv_8bit(img)))
        throw std::runtime_error("cannot write image: " + path);
}

RasterImage normalize_channels(const RasterImage& img) {
    if (img.empty()) throw std::invalid_argument("normalize_channels: empty image");
    RasterImage out = img;
    const std::size_t pixels = img.pixel_count();
    for (int k = 0; k < img.channels; ++k) {
        double lo = img.data[k], hi = img.data[k];
        for (std::size_t p = 0; p < pixels; ++p) {
            const double v = img.data[p * img.channels + k];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double range = hi - lo;
        for (std::size_t p = 0; p < pixels; ++p) {
            double& v = out.data[p * img.channels + k];
            v = (range > 0.0) ? (v - lo) / range : 0.0;
        }
    }
    return out;
}

RasterImage select_channels(const RasterImage& img, const std::vector<int>& bands) {
    if (bands.empty()) throw std::invalid_argument("select_channels: empty band list");
    for (int b : bands)
        if (b < 0 || b >= img.channels)
            throw std::invalid_argument("select_channels: band " + std::to_string(b) +
                                        " out of range for " + std::to_string(img.channels) +
                                        " channels");
    RasterImage out(img.height, img.width, static_cast<int>(bands.size()));
    for (std::size_t p = 0; p < img.pixel_count(); ++p)
        for (std::size_t k = 0; k < bands.size(); ++k)
            out.data[p * bands.size() + k] = img.data[p * img.channels + bands[k]];
    return out;
}

BinaryMask load_mask(const std::string& path) {
    const RasterImage img = load_image(path);
    BinaryMask mask(img.height, img.width);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            bool any = false;
            for (int k = 0; k < img.channels; ++k) any = any || img.at(r, c, k) > 0.0;
            mask.at(r, c) = any ? 1 : 0;
        }
    return mask;
}

void write_mask(const BinaryMask& mask, const std::string& path) {
    RasterImage img(mask.height, mask.width, 1);
    for (std::size_t i = 0; i < mask.values.size(); ++i)
        img.data[i] = mask.values[i] ? 1.0 : 0.0;
    write_image(img, path);
}

void write_change_map(const BinaryMask& cm, const BinaryMask& gt, const std::string& path) {
    if (cm.height != gt.height || cm.width != gt.width)
        throw std::invalid_argument("write_change_map: dimension mismatch");
    RasterImage img(cm.height, cm.width, 3);
    for (int r = 0; r < cm.height; ++r) {
        for (int c = 0; c < cm.width; ++c) {
            const bool pred = cm.at(r, c) != 0;
            const bool truth = gt.at(r, c) != 0;
            double rgb[3] = {0, 0, 0};                    // TN black
            if (pred && truth) rgb[0] = rgb[1] = rgb[2] = 1.0;  // TP white
            else if (pred && !truth) rgb[0] = 1.0;              // FP red
            else if (!pred && truth) rgb[1] = 1.0;              // FN green
            for (int k = 0; k < 3; ++k) img.at(r, c, k) = rgb[k];
        }
    }
    write_image(img, path);
}

void write_score_png(const RasterImage& scores, const std::string& path) {
    if (scores.channels != 1)
        throw std::invalid_argument("write_score_png: expected a single-channel score field");
    write_image(normalize_channels(scores), path);
}

} // namespace vdf
