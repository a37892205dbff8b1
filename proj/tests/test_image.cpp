#include "vdf/image.hpp"
#include "vdf/matrix_io.hpp"

#include "support.hpp"

#include <doctest.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <array>
#include <random>

using namespace vdf;
using testsupport::TempDir;

TEST_CASE("load_image scales 8-bit samples by 255") {
    TempDir tmp("vdf-img");
    // Write the fixture directly through OpenCV so the loader is exercised
    // end to end, not against itself.
    cv::Mat m(2, 2, CV_8UC1);
    m.at<std::uint8_t>(0, 0) = 0;
    m.at<std::uint8_t>(0, 1) = 255;
    m.at<std::uint8_t>(1, 0) = 128;
    m.at<std::uint8_t>(1, 1) = 64;
    REQUIRE(cv::imwrite(tmp.file("g.png"), m));

    const RasterImage img = load_image(tmp.file("g.png"));
    CHECK(img.height == 2);
    CHECK(img.width == 2);
    CHECK(img.channels == 1);
    CHECK(img.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(img.at(0, 1, 0) == doctest::Approx(1.0));
    CHECK(img.at(1, 0, 0) == doctest::Approx(128.0 / 255.0));
    CHECK(img.at(1, 1, 0) == doctest::Approx(64.0 / 255.0));
}

TEST_CASE("load_image keeps channel count and converts BGR to RGB") {
    TempDir tmp("vdf-img");
    cv::Mat m(1, 1, CV_8UC3, cv::Scalar(10, 20, 30));  // B=10 G=20 R=30
    REQUIRE(cv::imwrite(tmp.file("c.png"), m));
    const RasterImage img = load_image(tmp.file("c.png"));
    CHECK(img.channels == 3);
    CHECK(img.at(0, 0, 0) == doctest::Approx(30.0 / 255.0));
    CHECK(img.at(0, 0, 1) == doctest::Approx(20.0 / 255.0));
    CHECK(img.at(0, 0, 2) == doctest::Approx(10.0 / 255.0));
}

TEST_CASE("load_image supports 16-bit depth") {
    TempDir tmp("vdf-img");
    cv::Mat m(1, 2, CV_16UC1);
    m.at<std::uint16_t>(0, 0) = 0;
    m.at<std::uint16_t>(0, 1) = 65535;
    REQUIRE(cv::imwrite(tmp.file("d.png"), m));
    const RasterImage img = load_image(tmp.file("d.png"));
    CHECK(img.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(img.at(0, 1, 0) == doctest::Approx(1.0));
}

TEST_CASE("load_image error paths") {
    CHECK_THROWS_AS(load_image("/nonexistent/nowhere.png"), std::runtime_error);
}

TEST_CASE("write/load round-trip is lossless for 8-bit data") {
    TempDir tmp("vdf-img");
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (const int channels : {1, 3}) {
        RasterImage img(9, 13, channels);
        for (double& v : img.data) v = byte(rng) / 255.0;
        const std::string path = tmp.file("rt" + std::to_string(channels) + ".png");
        write_image(img, path);
        const RasterImage back = load_image(path);
        REQUIRE(back.data.size() == img.data.size());
        for (std::size_t i = 0; i < img.data.size(); ++i)
            CHECK(back.data[i] == img.data[i]);  // bitwise
    }
}

TEST_CASE("float sidecar round-trips at full precision") {
    TempDir tmp("vdf-img");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    RasterImage img(4, 5, 7);  // band count PNG cannot carry
    for (double& v : img.data) v = uni(rng);
    write_image(img, tmp.file("bands.fmat"));
    const RasterImage back = load_image(tmp.file("bands.fmat"));
    CHECK(back.channels == 7);
    for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("sidecar rejects truncated payloads") {
    TempDir tmp("vdf-img");
    {
        std::vector<double> vals(6, 1.0);
        write_float_matrix(tmp.file("t.fmat"), 2, 3, 1, vals.data());
    }
    // chop the file
    std::filesystem::resize_file(tmp.file("t.fmat"), 20);
    CHECK_THROWS_AS(read_float_matrix(tmp.file("t.fmat")), std::runtime_error);
}

TEST_CASE("label sidecar round-trips") {
    TempDir tmp("vdf-img");
    std::vector<std::int32_t> labels{0, 1, 2, 2, 1, 0};
    write_label_matrix(tmp.file("l.imat"), 2, 3, labels.data());
    const LabelMatrixFile back = read_label_matrix(tmp.file("l.imat"));
    CHECK(back.rows == 2);
    CHECK(back.cols == 3);
    CHECK(back.values == labels);
}

TEST_CASE("normalize_channels maps each channel onto [0,1]") {
    RasterImage img(1, 3, 1);
    img.data = {2.0, 4.0, 6.0};
    const RasterImage out = normalize_channels(img);
    CHECK(out.data[0] == doctest::Approx(0.0));
    CHECK(out.data[1] == doctest::Approx(0.5));
    CHECK(out.data[2] == doctest::Approx(1.0));
}

TEST_CASE("normalize_channels sends constant channels to zero") {
    RasterImage img(1, 2, 1);
    img.data = {5.0, 5.0};
    const RasterImage out = normalize_channels(img);
    CHECK(out.data[0] == 0.0);
    CHECK(out.data[1] == 0.0);
}

TEST_CASE("normalize_channels: recomputed min/max hit 0 and 1, and the map is idempotent") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-3.0, 9.0);
    RasterImage img(6, 7, 2);
    for (double& v : img.data) v = uni(rng);
    const RasterImage out = normalize_channels(img);
    for (int k = 0; k < 2; ++k) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t p = 0; p < out.pixel_count(); ++p) {
            lo = std::min(lo, out.data[p * 2 + k]);
            hi = std::max(hi, out.data[p * 2 + k]);
        }
        CHECK(lo == doctest::Approx(0.0));
        CHECK(hi == doctest::Approx(1.0));
    }
    const RasterImage again = normalize_channels(out);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        CHECK(again.data[i] == doctest::Approx(out.data[i]).epsilon(1e-12));
}

TEST_CASE("write_change_map color codes the four confusion categories") {
    TempDir tmp("vdf-img");

    BinaryMask cm(2, 2), gt(2, 2);
    cm.at(0, 0) = 1; gt.at(0, 0) = 1;  // TP
    cm.at(0, 1) = 1; gt.at(0, 1) = 0;  // FP
    cm.at(1, 0) = 0; gt.at(1, 0) = 0;  // TN
    cm.at(1, 1) = 0; gt.at(1, 1) = 1;  // FN
    write_change_map(cm, gt, tmp.file("cm.png"));

    const RasterImage img = load_image(tmp.file("cm.png"));
    const auto rgb = [&](int r, int c) {
        return std::array<double, 3>{img.at(r, c, 0), img.at(r, c, 1), img.at(r, c, 2)};
    };
    CHECK(rgb(0, 0) == std::array<double, 3>{1, 1, 1});
    CHECK(rgb(0, 1) == std::array<double, 3>{1, 0, 0});
    CHECK(rgb(1, 0) == std::array<double, 3>{0, 0, 0});
    CHECK(rgb(1, 1) == std::array<double, 3>{0, 1, 0});
}

TEST_CASE("write_change_map all-true and all-red scenes") {
    TempDir tmp("vdf-img");
    BinaryMask all(3, 3), none(3, 3);
    for (auto& v : all.values) v = 1;

    write_change_map(all, all, tmp.file("white.png"));
    RasterImage white = load_image(tmp.file("white.png"));
    for (double v : white.data) CHECK(v == 1.0);

    write_change_map(all, none, tmp.file("red.png"));
    RasterImage red = load_image(tmp.file("red.png"));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            CHECK(red.at(r, c, 0) == 1.0);
            CHECK(red.at(r, c, 1) == 0.0);
            CHECK(red.at(r, c, 2) == 0.0);
        }
}

TEST_CASE("write_change_map rejects mismatched dimensions") {
    BinaryMask cm(2, 2), gt(3, 2);
    CHECK_THROWS_AS(write_change_map(cm, gt, "/tmp/never.png"), std::invalid_argument);
}

TEST_CASE("mask round-trip") {
    TempDir tmp("vdf-img");
    BinaryMask m(2, 3);
    m.at(0, 1) = 1;
    m.at(1, 2) = 1;
    write_mask(m, tmp.file("m.png"));
    const BinaryMask back = load_mask(tmp.file("m.png"));
    CHECK(back.values == m.values);
}
