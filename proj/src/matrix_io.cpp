#include "vdf/matrix_io.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "sidecar matrix files are little-endian; big-endian hosts are unsupported");

namespace vdf {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

struct Header {
    int rows, cols, channels;
};

Header read_header(std::ifstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing sidecar header: " + path);
    std::istringstream hs(line);
    Header h{};
    if (!(hs >> h.rows >> h.cols >> h.channels) || h.rows <= 0 || h.cols <= 0 || h.channels <= 0)
        throw std::runtime_error("malformed sidecar header: " + path);
    return h;
}

} // namespace

void write_float_matrix(const std::string& path, int rows, int cols, int channels,
                        const double* values) {
    if (rows <= 0 || cols <= 0 || channels <= 0)
        throw std::invalid_argument("write_float_matrix: empty shape");
    auto out = open_out(path);
    out << rows << ' ' << cols << ' ' << channels << '\n';
    const std::size_t n = static_cast<std::size_t>(rows) * cols * channels;
    out.write(reinterpret_cast<const char*>(values), static_cast<std::streamsize>(n * sizeof(double)));
    if (!out) throw std::runtime_error("short write: " + path);
}

FloatMatrixFile read_float_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    const Header h = read_header(in, path);
    FloatMatrixFile m{h.rows, h.cols, h.channels, {}};
    const std::size_t n = static_cast<std::size_t>(h.rows) * h.cols * h.channels;
    m.values.resize(n);
    in.read(reinterpret_cast<char*>(m.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double))
        throw std::runtime_error("truncated sidecar payload: " + path);
    return m;
}

void write_label_matrix(const std::string& path, int rows, int cols,
                        const std::int32_t* values) {
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("write_label_matrix: empty shape");
    auto out = open_out(path);
    out << rows << ' ' << cols << ' ' << 1 << '\n';
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    out.write(reinterpret_cast<const char*>(values), static_cast<std::streamsize>(n * sizeof(std::int32_t)));
    if (!out) throw std::runtime_error("short write: " + path);
}

LabelMatrixFile read_label_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    const Header h = read_header(in, path);
    if (h.channels != 1) throw std::runtime_error("label raster must have one channel: " + path);
    LabelMatrixFile m{h.rows, h.cols, {}};
    const std::size_t n = static_cast<std::size_t>(h.rows) * h.cols;
    m.values.resize(n);
    in.read(reinterpret_cast<char*>(m.values.data()), static_cast<std::streamsize>(n * sizeof(std::int32_t)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(std::int32_t))
        throw std::runtime_error("truncated sidecar payload: " + path);
    return m;
}

} // namespace vdf
