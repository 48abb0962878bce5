// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/depth_codec.hpp"
#include "ldm3d/sphere_mesh.hpp"
#include "ldm3d/vec3.hpp"

#include <cstddef>
#include <span>

namespace ldm3d {

/// Pinhole camera. yaw turns right (toward +Z from +X), pitch looks up.
struct Viewpoint {
    Vec3 position;
    double yaw = 0.0;
    double pitch = 0.0;
    double fov_y = 1.5707963267948966;
    std::size_t width = 512;
    std::size_t height = 512;
};

struct CameraBasis {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
};

/// Basis of the viewpoint; right stays horizontal for any pitch.
CameraBasis camera_basis(const Viewpoint &vp);

/// Throws InvalidArgument unless 0 < fov_y < pi and the image is non-empty.
void validate_viewpoint(const Viewpoint &vp);

/// Unit direction of the ray through the centre of pixel (x, y).
Vec3 pixel_ray(const Viewpoint &vp, double x, double y);

/// Bilinear texture fetch with u wrapping and v clamped, texel centres at
/// (i + 0.5) / size. Returns 0..255 floating values.
std::array<double, 3> sample_texture(const RgbImage &texture, double u, double v);

struct RasterOptions {
    /// Worker threads over horizontal bands; 0 = hardware concurrency.
    std::size_t threads = 0;
    /// Near clipping distance along the view axis.
    double near_plane = 1e-4;
};

/// Z-buffered rasterisation of textured triangles with perspective-correct
/// UV interpolation. Faces are not culled. Uncovered pixels stay black.
/// Output is independent of the thread count.
RgbImage rasterize(std::span<const Vec3> positions, std::span<const Uv> uvs,
                   std::span<const Triangle> triangles, const RgbImage &texture,
                   const Viewpoint &vp, const RasterOptions &options = {});

} // namespace ldm3d
