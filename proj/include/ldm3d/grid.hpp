// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/error.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ldm3d {

/// Interleaved (row-major, channel-last) raster. The Tag parameter keeps
/// semantically different images of the same storage type apart.
template <typename T, std::size_t Channels, typename Tag>
class Grid {
public:
    using value_type = T;
    static constexpr std::size_t channels = Channels;

    Grid() = default;

    Grid(std::size_t width, std::size_t height, T fill = T{})
        : width_(width), height_(height) {
        check_dims(width, height);
        data_.assign(width * height * Channels, fill);
    }

    Grid(std::size_t width, std::size_t height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dims(width, height);
        if (data_.size() != width * height * Channels) {
            throw Error(ErrorCode::DimensionMismatch,
                        "buffer holds " + std::to_string(data_.size()) + " values, expected " +
                            std::to_string(width * height * Channels));
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return width_ * height_; }
    bool empty() const noexcept { return data_.empty(); }

    T &at(std::size_t x, std::size_t y, std::size_t c = 0) {
        return data_[(y * width_ + x) * Channels + c];
    }
    const T &at(std::size_t x, std::size_t y, std::size_t c = 0) const {
        return data_[(y * width_ + x) * Channels + c];
    }

    std::span<T, Channels> pixel(std::size_t index) {
        return std::span<T, Channels>(data_.data() + index * Channels, Channels);
    }
    std::span<const T, Channels> pixel(std::size_t index) const {
        return std::span<const T, Channels>(data_.data() + index * Channels, Channels);
    }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    template <typename OtherT, std::size_t OtherC, typename OtherTag>
    bool same_size(const Grid<OtherT, OtherC, OtherTag> &other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid &, const Grid &) = default;

private:
    static void check_dims(std::size_t width, std::size_t height) {
        if (width == 0 || height == 0) {
            throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
        }
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> data_;
};

} // namespace ldm3d
