#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vdf {

// Sidecar matrix files: one text header line "rows cols channels\n" followed
// by rows*cols*channels row-major little-endian values. ".fmat" carries
// 64-bit floats (multiband images, score fields), ".imat" carries 32-bit
// signed integers (segment label rasters).

struct FloatMatrixFile {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    std::vector<double> values;
};

struct LabelMatrixFile {
    int rows = 0;
    int cols = 0;
    std::vector<std::int32_t> values;
};

void write_float_matrix(const std::string& path, int rows, int cols, int channels,
                        const double* values);
FloatMatrixFile read_float_matrix(const std::string& path);

void write_label_matrix(const std::string& path, int rows, int cols,
                        const std::int32_t* values);
LabelMatrixFile read_label_matrix(const std::string& path);

} // namespace vdf
