// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/depth_codec.hpp"
#include "ldm3d/error.hpp"
#include "ldm3d/rasterizer.hpp"
#include "ldm3d/sphere_mesh.hpp"

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace ldm3d {

/// Panorama texture. A width:height ratio other than 2:1 is allowed but
/// reported through standard_aspect().
class EquirectImage {
public:
    explicit EquirectImage(RgbImage image) : image_(std::move(image)) {}

    const RgbImage &image() const noexcept { return image_; }
    bool standard_aspect() const noexcept { return image_.width() == 2 * image_.height(); }

private:
    RgbImage image_;
};

/// Renders the textured mesh from `vp`. The camera must sit strictly inside
/// the displaced surface (|position| < smallest vertex radius).
RgbImage render_view(const SphereMesh &mesh, const EquirectImage &texture, const Viewpoint &vp,
                     const RasterOptions &options = {});

/// Left and right eye frames, offset by -ipd/2 and +ipd/2 along the
/// horizontal right axis of `center`. A negative ipd swaps the eyes.
std::pair<RgbImage, RgbImage> render_stereo_pair(const SphereMesh &mesh,
                                                 const EquirectImage &texture,
                                                 const Viewpoint &center, double ipd,
                                                 const RasterOptions &options = {});

/// Thrown by orbit_sequence for the first viewpoint outside the mesh.
class InvalidPathError : public Error {
public:
    InvalidPathError(std::size_t index, const std::string &what)
        : Error(ErrorCode::ViewpointOutsideMesh,
                "viewpoint " + std::to_string(index) + ": " + what),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Writes frame_%05d.png per viewpoint into out_dir (created if needed).
/// Every viewpoint is validated before the first frame is written.
std::vector<std::filesystem::path> orbit_sequence(const SphereMesh &mesh,
                                                  const EquirectImage &texture,
                                                  std::span<const Viewpoint> path,
                                                  const std::filesystem::path &out_dir,
                                                  const RasterOptions &options = {});

/// `frames` viewpoints circling `base.position` in the horizontal plane,
/// keeping base's orientation. With closed = true the last viewpoint is an
/// exact copy of the first.
std::vector<Viewpoint> circular_orbit(const Viewpoint &base, double radius, std::size_t frames,
                                      bool closed = true);

} // namespace ldm3d
