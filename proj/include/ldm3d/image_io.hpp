// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/depth_codec.hpp"

#include <filesystem>

namespace ldm3d {

// PNG codecs. Writers use fixed zlib settings and no timestamp chunks, so the
// same image always produces the same bytes.

RgbImage read_rgb_png(const std::filesystem::path &path);
void write_rgb_png(const std::filesystem::path &path, const RgbImage &image);

PackedDepthImage read_packed_png(const std::filesystem::path &path);
void write_packed_png(const std::filesystem::path &path, const PackedDepthImage &image);

/// Reads a single-channel PNG. 16-bit files load as-is; 8-bit files are
/// widened by 257 so 255 maps to 65535.
DepthMap16 read_depth_png(const std::filesystem::path &path);
void write_depth_png(const std::filesystem::path &path, const DepthMap16 &depth);

} // namespace ldm3d
