// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/depth_codec.hpp"
#include "ldm3d/grid.hpp"
#include "ldm3d/vec3.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace ldm3d {

// Axis convention shared with exported scenes: right-handed, +Y up,
// longitude 0 along +X and increasing toward +Z (turning right for a viewer
// at the origin looking along +X). Latitude is the polar angle from +Y.
// Texture coordinates: u = longitude / 2pi, v = latitude / pi, so image row
// 0 is the north pole.

struct DepthFieldTag;
/// Normalised depth in [0, 1] (1 = near, 0 = far), sampled at vertex UVs.
using DepthField = Grid<double, 1, DepthFieldTag>;

DepthField depth_field_from(const DepthMap16 &depth);

/// Bilinear lookup at (u, v) with texel centres at (i + 0.5) / size; u
/// wraps around, v clamps at the poles. Constant regions sample exactly.
double sample_depth(const DepthField &field, double u, double v);

struct Uv {
    double u = 0.0;
    double v = 0.0;
};

using Triangle = std::array<std::uint32_t, 3>;

inline constexpr double kMinRadiusFraction = 0.05;

/// Lat-long sphere. Vertex (i, j) sits at latitude pi*i/rows and longitude
/// 2pi*j/cols; column cols duplicates column 0 with u = 1 so the texture
/// seam needs no wrap inside a triangle. Pole rows collapse to one point
/// but keep per-column UVs, centred on their triangle's span.
class SphereMesh {
public:
    SphereMesh(std::size_t rows, std::size_t cols, double base_radius);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double base_radius() const noexcept { return base_radius_; }
    /// Strength of the single displacement applied, 0 if none.
    double strength() const noexcept { return strength_; }
    std::size_t displacement_passes() const noexcept { return passes_; }

    std::size_t vertex_count() const noexcept { return directions_.size(); }
    std::size_t index(std::size_t row, std::size_t col) const noexcept {
        return row * (cols_ + 1) + col;
    }

    const std::vector<Vec3> &directions() const noexcept { return directions_; }
    const std::vector<double> &radii() const noexcept { return radii_; }
    const std::vector<Uv> &uvs() const noexcept { return uvs_; }
    const std::vector<Triangle> &triangles() const noexcept { return triangles_; }

    Vec3 position(std::size_t i) const { return radii_[i] * directions_[i]; }
    std::vector<Vec3> positions() const;
    double min_radius() const;

private:
    friend SphereMesh displace_vertices(const SphereMesh &, const DepthField &, double);

    std::size_t rows_;
    std::size_t cols_;
    double base_radius_;
    double strength_ = 0.0;
    std::size_t passes_ = 0;
    std::vector<Vec3> directions_;
    std::vector<double> radii_;
    std::vector<Uv> uvs_;
    std::vector<Triangle> triangles_;
};

inline SphereMesh build_sphere_mesh(std::size_t rows, std::size_t cols, double base_radius) {
    return SphereMesh(rows, cols, base_radius);
}

/// r' = r * (1 + k (1 - 2 d)), floored at 0.05 r, with d sampled at the
/// vertex UV (pole vertices use the mean of the first/last texel row).
/// d = 0.5 leaves a vertex untouched, d > 0.5 pulls it toward the origin
/// and d < 0.5 pushes it away. Directions never change.
SphereMesh displace_vertices(const SphereMesh &mesh, const DepthField &depth, double strength);

inline SphereMesh displace_vertices(const SphereMesh &mesh, const DepthMap16 &depth,
                                    double strength) {
    return displace_vertices(mesh, depth_field_from(depth), strength);
}

/// Wavefront OBJ with positions, texture coordinates (v flipped to the OBJ
/// bottom-up convention) and faces.
void write_obj(const std::filesystem::path &path, const SphereMesh &mesh);

} // namespace ldm3d
