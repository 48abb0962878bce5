// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace ldm3d {

struct RgbTag;
struct PackedDepthTag;
struct Depth16Tag;

using RgbImage = Grid<std::uint8_t, 3, RgbTag>;
/// 24-bit depth frame split into bytes, big-endian: channel 0 holds bits
/// 23..16 (always zero for 16-bit sources), channel 1 bits 15..8 and
/// channel 2 bits 7..0.
using PackedDepthImage = Grid<std::uint8_t, 3, PackedDepthTag>;
/// Relative disparity-space depth as stored by external depth estimators.
using DepthMap16 = Grid<std::uint16_t, 1, Depth16Tag>;

/// H x W x 6 tensor, channel order [R, G, B, D_hi, D_mid, D_lo]. Values
/// produced by assemble_rgbd lie in [0, 1]; tensors coming back from a model
/// may drift outside and are clamped by split_rgbd.
class RgbdTensor {
public:
    static constexpr std::size_t channels = 6;

    RgbdTensor() = default;
    RgbdTensor(std::size_t width, std::size_t height, float fill = 0.0f);
    RgbdTensor(std::size_t width, std::size_t height, std::vector<float> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }

    float &at(std::size_t x, std::size_t y, std::size_t c) {
        return data_[(y * width_ + x) * channels + c];
    }
    float at(std::size_t x, std::size_t y, std::size_t c) const {
        return data_[(y * width_ + x) * channels + c];
    }

    std::span<float> values() noexcept { return data_; }
    std::span<const float> values() const noexcept { return data_; }

    bool in_unit_range() const noexcept;

    friend bool operator==(const RgbdTensor &, const RgbdTensor &) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<float> data_;
};

/// Counts packed pixels whose high channel was non-zero, i.e. 24-bit data
/// that could not be represented in 16 bits and was truncated.
struct UnpackReport {
    std::size_t truncated_pixels = 0;
    bool truncated() const noexcept { return truncated_pixels != 0; }
};

PackedDepthImage pack_depth(const DepthMap16 &depth);

DepthMap16 unpack_depth(const PackedDepthImage &packed, UnpackReport *report = nullptr);

RgbdTensor assemble_rgbd(const RgbImage &rgb, const PackedDepthImage &packed);

/// Inverse of assemble_rgbd. Channels are clamped to [0, 1], scaled by 255
/// and rounded half away from zero before unpacking.
std::pair<RgbImage, DepthMap16> split_rgbd(const RgbdTensor &tensor,
                                           UnpackReport *report = nullptr);

// .rgbd files: u32 width, u32 height, then H*W*6 float32, all little-endian.
void write_rgbd(const std::filesystem::path &path, const RgbdTensor &tensor);
RgbdTensor read_rgbd(const std::filesystem::path &path);

} // namespace ldm3d
