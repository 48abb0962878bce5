// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/depth_codec.hpp"
#include "ldm3d/render.hpp"
#include "ldm3d/sphere_mesh.hpp"

#include <filesystem>

namespace ldm3d {

inline constexpr int kSceneVersion = 1;

// A scene bundle is a directory holding scene.json, texture.png (8-bit RGB)
// and depth.png (16-bit gray). scene.json records the tessellation, base
// radius, displacement strength, displacement formula and the axis/UV
// conventions, which is everything needed to rebuild the displaced mesh.

struct SceneBundle {
    SphereMesh mesh;
    RgbImage texture;
    DepthMap16 depth;
};

/// `depth` must be the map `mesh` was displaced with (checked); a null
/// depth fails with MissingAsset.
void export_scene(const SphereMesh &mesh, const EquirectImage &texture, const DepthMap16 *depth,
                  const std::filesystem::path &out_dir);

/// Rebuilds the displaced mesh from a bundle. VersionMismatch for unknown
/// versions, MissingAsset for absent files, FormatError for malformed JSON.
SceneBundle import_scene(const std::filesystem::path &dir);

} // namespace ldm3d
