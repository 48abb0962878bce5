// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace ldm3d {

namespace {

struct FileCloser {
    void operator()(std::FILE *f) const noexcept {
        if (f) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return f;
}

/// Decoded PNG with raw samples: 8-bit samples one byte each, 16-bit samples
/// widened to uint16 in host order.
struct RawPng {
    std::size_t width = 0;
    std::size_t height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples;
};

RawPng decode_png(const std::filesystem::path &path) {
    FilePtr file = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw Error(ErrorCode::FormatError, path.string() + " is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::IoError, "libpng initialisation failed");
    }
    RawPng raw;
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::FormatError, "corrupt PNG data in " + path.string());
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (color_type & PNG_COLOR_MASK_ALPHA) {
        png_set_strip_alpha(png);
    }
    if (bit_depth == 16) {
        png_set_swap(png); // samples become host-order (little-endian) uint16
    }
    png_read_update_info(png, info);

    raw.width = png_get_image_width(png, info);
    raw.height = png_get_image_height(png, info);
    raw.channels = png_get_channels(png, info);
    bit_depth = png_get_bit_depth(png, info);
    raw.bit_depth = bit_depth;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * raw.height);
    rows.resize(raw.height);
    for (std::size_t y = 0; y < raw.height; ++y) {
        rows[y] = buffer.data() + y * rowbytes;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t count = raw.width * raw.height * static_cast<std::size_t>(raw.channels);
    raw.samples.resize(count);
    if (bit_depth == 16) {
        for (std::size_t i = 0; i < count; ++i) {
            raw.samples[i] = static_cast<std::uint16_t>(buffer[2 * i] | (buffer[2 * i + 1] << 8));
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            raw.samples[i] = buffer[i];
        }
    }
    return raw;
}

void encode_png(const std::filesystem::path &path, std::size_t width, std::size_t height,
                int color_type, int bit_depth, const std::vector<png_byte> &buffer) {
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::IoError, "libpng initialisation failed");
    }
    const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t rowbytes = width * static_cast<std::size_t>(channels) * (bit_depth / 8);
    std::vector<png_bytep> rows(height);
    for (std::size_t y = 0; y < height; ++y) {
        rows[y] = const_cast<png_bytep>(buffer.data() + y * rowbytes);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::IoError, "PNG encoding failed for " + path.string());
    }
    png_init_io(png, file.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

template <typename Image>
Image read_rgb8(const std::filesystem::path &path) {
    RawPng raw = decode_png(path);
    if (raw.bit_depth != 8) {
        throw Error(ErrorCode::FormatError, path.string() + ": expected an 8-bit PNG");
    }
    Image image(raw.width, raw.height);
    auto dst = image.values();
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            // grayscale expands to three equal channels
            const std::size_t src_c = raw.channels >= 3 ? c : 0;
            dst[i * 3 + c] = static_cast<std::uint8_t>(raw.samples[i * raw.channels + src_c]);
        }
    }
    return image;
}

template <typename Image>
void write_rgb8(const std::filesystem::path &path, const Image &image) {
    const auto src = image.values();
    std::vector<png_byte> buffer(src.begin(), src.end());
    encode_png(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, buffer);
}

} // namespace

RgbImage read_rgb_png(const std::filesystem::path &path) { return read_rgb8<RgbImage>(path); }

void write_rgb_png(const std::filesystem::path &path, const RgbImage &image) {
    write_rgb8(path, image);
}

PackedDepthImage read_packed_png(const std::filesystem::path &path) {
    return read_rgb8<PackedDepthImage>(path);
}

void write_packed_png(const std::filesystem::path &path, const PackedDepthImage &image) {
    write_rgb8(path, image);
}

DepthMap16 read_depth_png(const std::filesystem::path &path) {
    RawPng raw = decode_png(path);
    if (raw.channels != 1) {
        throw Error(ErrorCode::FormatError,
                    path.string() + ": expected a single-channel depth PNG, got " +
                        std::to_string(raw.channels) + " channels");
    }
    DepthMap16 depth(raw.width, raw.height);
    auto dst = depth.values();
    const std::uint16_t widen = raw.bit_depth == 16 ? 1 : 257;
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = static_cast<std::uint16_t>(raw.samples[i] * widen);
    }
    return depth;
}

void write_depth_png(const std::filesystem::path &path, const DepthMap16 &depth) {
    const auto src = depth.values();
    std::vector<png_byte> buffer(src.size() * 2);
    for (std::size_t i = 0; i < src.size(); ++i) {
        buffer[2 * i] = static_cast<png_byte>(src[i] >> 8); // PNG stores 16-bit big-endian
        buffer[2 * i + 1] = static_cast<png_byte>(src[i] & 0xFF);
    }
    encode_png(path, depth.width(), depth.height(), PNG_COLOR_TYPE_GRAY, 16, buffer);
}

} // namespace ldm3d
