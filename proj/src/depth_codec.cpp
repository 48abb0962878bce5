// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/depth_codec.hpp"

#include "ldm3d/binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ldm3d {

namespace {

std::uint8_t quantize_unit(float v) {
    // NaN compares false against both bounds and would survive std::clamp.
    const double clamped = std::isnan(v) ? 0.0 : std::clamp(static_cast<double>(v), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

float normalize_byte(std::uint8_t b) { return static_cast<float>(b / 255.0); }

} // namespace

RgbdTensor::RgbdTensor(std::size_t width, std::size_t height, float fill)
    : width_(width), height_(height) {
    if (width == 0 || height == 0) {
        throw Error(ErrorCode::InvalidArgument, "tensor dimensions must be positive");
    }
    data_.assign(width * height * channels, fill);
}

RgbdTensor::RgbdTensor(std::size_t width, std::size_t height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width == 0 || height == 0) {
        throw Error(ErrorCode::InvalidArgument, "tensor dimensions must be positive");
    }
    if (data_.size() != width * height * channels) {
        throw Error(ErrorCode::DimensionMismatch, "tensor buffer size does not match W*H*6");
    }
}

bool RgbdTensor::in_unit_range() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](float v) { return v >= 0.0f && v <= 1.0f; });
}

PackedDepthImage pack_depth(const DepthMap16 &depth) {
    PackedDepthImage packed(depth.width(), depth.height());
    const auto src = depth.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        auto px = packed.pixel(i);
        px[0] = 0;
        px[1] = static_cast<std::uint8_t>(src[i] >> 8);
        px[2] = static_cast<std::uint8_t>(src[i] & 0xFF);
    }
    return packed;
}

DepthMap16 unpack_depth(const PackedDepthImage &packed, UnpackReport *report) {
    DepthMap16 depth(packed.width(), packed.height());
    auto dst = depth.values();
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const auto px = packed.pixel(i);
        truncated += px[0] != 0;
        dst[i] = static_cast<std::uint16_t>((px[1] << 8) | px[2]);
    }
    if (report) {
        report->truncated_pixels = truncated;
    }
    return depth;
}

RgbdTensor assemble_rgbd(const RgbImage &rgb, const PackedDepthImage &packed) {
    if (!rgb.same_size(packed)) {
        throw Error(ErrorCode::DimensionMismatch,
                    "rgb is " + std::to_string(rgb.width()) + "x" + std::to_string(rgb.height()) +
                        " but packed depth is " + std::to_string(packed.width()) + "x" +
                        std::to_string(packed.height()));
    }
    RgbdTensor tensor(rgb.width(), rgb.height());
    auto out = tensor.values();
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        const auto c = rgb.pixel(i);
        const auto d = packed.pixel(i);
        float *dst = out.data() + i * RgbdTensor::channels;
        for (std::size_t k = 0; k < 3; ++k) {
            dst[k] = normalize_byte(c[k]);
            dst[3 + k] = normalize_byte(d[k]);
        }
    }
    return tensor;
}

std::pair<RgbImage, DepthMap16> split_rgbd(const RgbdTensor &tensor, UnpackReport *report) {
    RgbImage rgb(tensor.width(), tensor.height());
    PackedDepthImage packed(tensor.width(), tensor.height());
    const auto in = tensor.values();
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        const float *src = in.data() + i * RgbdTensor::channels;
        auto c = rgb.pixel(i);
        auto d = packed.pixel(i);
        for (std::size_t k = 0; k < 3; ++k) {
            c[k] = quantize_unit(src[k]);
            d[k] = quantize_unit(src[3 + k]);
        }
    }
    return {std::move(rgb), unpack_depth(packed, report)};
}

void write_rgbd(const std::filesystem::path &path, const RgbdTensor &tensor) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    binary::put_u32(out, static_cast<std::uint32_t>(tensor.width()));
    binary::put_u32(out, static_cast<std::uint32_t>(tensor.height()));
    for (float v : tensor.values()) {
        binary::put_f32(out, v);
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

RgbdTensor read_rgbd(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    if (!binary::get_u32(in, width) || !binary::get_u32(in, height)) {
        throw Error(ErrorCode::FormatError, path.string() + ": truncated .rgbd header");
    }
    if (width == 0 || height == 0) {
        throw Error(ErrorCode::FormatError, path.string() + ": zero dimension in .rgbd header");
    }
    std::vector<float> data(static_cast<std::size_t>(width) * height * RgbdTensor::channels);
    for (float &v : data) {
        if (!binary::get_f32(in, v)) {
            throw Error(ErrorCode::FormatError, path.string() + ": truncated .rgbd payload");
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorCode::FormatError, path.string() + ": trailing bytes after .rgbd payload");
    }
    return RgbdTensor(width, height, std::move(data));
}

} // namespace ldm3d
