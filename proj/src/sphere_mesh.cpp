// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/sphere_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace ldm3d {

DepthField depth_field_from(const DepthMap16 &depth) {
    DepthField field(depth.width(), depth.height());
    const auto src = depth.values();
    auto dst = field.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] / 65535.0;
    }
    return field;
}

double sample_depth(const DepthField &field, double u, double v) {
    const auto w = static_cast<std::ptrdiff_t>(field.width());
    const auto h = static_cast<std::ptrdiff_t>(field.height());
    const double x = u * static_cast<double>(w) - 0.5;
    const double y = std::clamp(v * static_cast<double>(h) - 0.5, 0.0, static_cast<double>(h - 1));
    const double xf = std::floor(x);
    const double yf = std::floor(y);
    const double fx = x - xf;
    const double fy = y - yf;
    auto wrap = [w](std::ptrdiff_t i) { return static_cast<std::size_t>(((i % w) + w) % w); };
    const std::size_t x0 = wrap(static_cast<std::ptrdiff_t>(xf));
    const std::size_t x1 = wrap(static_cast<std::ptrdiff_t>(xf) + 1);
    const auto y0 = static_cast<std::size_t>(yf);
    const std::size_t y1 = std::min(y0 + 1, static_cast<std::size_t>(h - 1));
    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    const double top = lerp(field.at(x0, y0), field.at(x1, y0), fx);
    const double bottom = lerp(field.at(x0, y1), field.at(x1, y1), fx);
    return lerp(top, bottom, fy);
}

SphereMesh::SphereMesh(std::size_t rows, std::size_t cols, double base_radius)
    : rows_(rows), cols_(cols), base_radius_(base_radius) {
    if (rows < 2 || cols < 3 || !(base_radius > 0.0) || !std::isfinite(base_radius)) {
        throw Error(ErrorCode::InvalidTessellation,
                    "need rows >= 2, cols >= 3 and a positive radius (got " + std::to_string(rows) +
                        "x" + std::to_string(cols) + ", r=" + std::to_string(base_radius) + ")");
    }
    const std::size_t n = (rows + 1) * (cols + 1);
    directions_.resize(n);
    uvs_.resize(n);
    radii_.assign(n, base_radius);
    for (std::size_t i = 0; i <= rows; ++i) {
        const double lat = std::numbers::pi * static_cast<double>(i) / static_cast<double>(rows);
        const double sin_lat = i == rows ? 0.0 : std::sin(lat);
        const double cos_lat = i == rows ? -1.0 : std::cos(lat);
        const bool pole = i == 0 || i == rows;
        for (std::size_t j = 0; j <= cols; ++j) {
            const std::size_t k = index(i, j);
            if (j == cols) {
                directions_[k] = directions_[index(i, 0)];
            } else {
                const double lon =
                    2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(cols);
                directions_[k] = {sin_lat * std::cos(lon), cos_lat, sin_lat * std::sin(lon)};
            }
            double u = static_cast<double>(j) / static_cast<double>(cols);
            if (pole && j < cols) {
                u = (static_cast<double>(j) + 0.5) / static_cast<double>(cols);
            }
            uvs_[k] = {u, static_cast<double>(i) / static_cast<double>(rows)};
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const auto a = static_cast<std::uint32_t>(index(i, j));
            const auto b = static_cast<std::uint32_t>(index(i, j + 1));
            const auto c = static_cast<std::uint32_t>(index(i + 1, j));
            const auto d = static_cast<std::uint32_t>(index(i + 1, j + 1));
            if (i == 0) {
                triangles_.push_back({a, c, d});
            } else if (i + 1 == rows) {
                triangles_.push_back({a, c, b});
            } else {
                triangles_.push_back({a, c, b});
                triangles_.push_back({b, c, d});
            }
        }
    }
}

std::vector<Vec3> SphereMesh::positions() const {
    std::vector<Vec3> out(vertex_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = position(i);
    }
    return out;
}

double SphereMesh::min_radius() const { return *std::min_element(radii_.begin(), radii_.end()); }

SphereMesh displace_vertices(const SphereMesh &mesh, const DepthField &depth, double strength) {
    if (!(strength >= 0.0) || !std::isfinite(strength)) {
        throw Error(ErrorCode::InvalidArgument, "displacement strength must be finite and >= 0");
    }
    // Each pole is one point in space, so all of its copies take the mean of
    // the edge texel row; per-copy sampling would tear the pole open.
    auto row_mean = [&](std::size_t y) {
        double sum = 0.0;
        for (std::size_t x = 0; x < depth.width(); ++x) {
            sum += depth.at(x, y);
        }
        return sum / static_cast<double>(depth.width());
    };
    const double north = row_mean(0);
    const double south = row_mean(depth.height() - 1);
    const std::size_t stride = mesh.cols_ + 1;

    SphereMesh out = mesh;
    for (std::size_t i = 0; i < out.radii_.size(); ++i) {
        const std::size_t row = i / stride;
        const double d = row == 0              ? north
                         : row == mesh.rows_ ? south
                                             : sample_depth(depth, out.uvs_[i].u, out.uvs_[i].v);
        const double r = mesh.radii_[i];
        out.radii_[i] = std::max(r * (1.0 + strength * (1.0 - 2.0 * d)), kMinRadiusFraction * r);
    }
    out.strength_ = strength;
    out.passes_ = mesh.passes_ + 1;
    return out;
}

void write_obj(const std::filesystem::path &path, const SphereMesh &mesh) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    out.precision(9);
    out << "# lat-long sphere " << mesh.rows() << "x" << mesh.cols() << " base_radius "
        << mesh.base_radius() << " strength " << mesh.strength() << "\n";
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        const Vec3 p = mesh.position(i);
        out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    }
    for (const Uv &uv : mesh.uvs()) {
        out << "vt " << uv.u << ' ' << 1.0 - uv.v << '\n';
    }
    for (const Triangle &t : mesh.triangles()) {
        out << "f";
        for (std::uint32_t k : t) {
            out << ' ' << k + 1 << '/' << k + 1;
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

} // namespace ldm3d
