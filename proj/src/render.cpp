// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/render.hpp"

#include "ldm3d/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace ldm3d {

namespace {

void require_inside(const SphereMesh &mesh, const Viewpoint &vp) {
    const double distance = norm(vp.position);
    const double limit = mesh.min_radius();
    if (!(distance < limit)) {
        throw Error(ErrorCode::ViewpointOutsideMesh,
                    "camera at distance " + std::to_string(distance) +
                        " is not inside the surface (smallest vertex radius " +
                        std::to_string(limit) + ")");
    }
}

} // namespace

RgbImage render_view(const SphereMesh &mesh, const EquirectImage &texture, const Viewpoint &vp,
                     const RasterOptions &options) {
    validate_viewpoint(vp);
    require_inside(mesh, vp);
    RasterOptions scaled = options;
    scaled.near_plane = options.near_plane * mesh.min_radius();
    const auto positions = mesh.positions();
    return rasterize(positions, mesh.uvs(), mesh.triangles(), texture.image(), vp, scaled);
}

std::pair<RgbImage, RgbImage> render_stereo_pair(const SphereMesh &mesh,
                                                 const EquirectImage &texture,
                                                 const Viewpoint &center, double ipd,
                                                 const RasterOptions &options) {
    if (!std::isfinite(ipd)) {
        throw Error(ErrorCode::InvalidArgument, "ipd must be finite");
    }
    const Vec3 right = camera_basis(center).right;
    Viewpoint left_eye = center;
    Viewpoint right_eye = center;
    left_eye.position = center.position - (0.5 * ipd) * right;
    right_eye.position = center.position + (0.5 * ipd) * right;
    return {render_view(mesh, texture, left_eye, options),
            render_view(mesh, texture, right_eye, options)};
}

std::vector<std::filesystem::path> orbit_sequence(const SphereMesh &mesh,
                                                  const EquirectImage &texture,
                                                  std::span<const Viewpoint> path,
                                                  const std::filesystem::path &out_dir,
                                                  const RasterOptions &options) {
    for (std::size_t i = 0; i < path.size(); ++i) {
        try {
            validate_viewpoint(path[i]);
            require_inside(mesh, path[i]);
        } catch (const Error &e) {
            throw InvalidPathError(i, e.what());
        }
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> frames;
    frames.reserve(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05zu.png", i);
        const auto file = out_dir / name;
        write_rgb_png(file, render_view(mesh, texture, path[i], options));
        frames.push_back(file);
    }
    return frames;
}

std::vector<Viewpoint> circular_orbit(const Viewpoint &base, double radius, std::size_t frames,
                                      bool closed) {
    if (frames == 0) {
        throw Error(ErrorCode::InvalidArgument, "an orbit needs at least one frame");
    }
    std::vector<Viewpoint> path(frames, base);
    const std::size_t distinct = closed && frames > 1 ? frames - 1 : frames;
    for (std::size_t i = 0; i < distinct; ++i) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) /
                             static_cast<double>(distinct);
        path[i].position = base.position + Vec3{radius * std::cos(angle), 0.0,
                                                radius * std::sin(angle)};
    }
    if (distinct != frames) {
        path.back() = path.front();
    }
    return path;
}

} // namespace ldm3d
