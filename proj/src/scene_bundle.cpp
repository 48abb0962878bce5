// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/scene_bundle.hpp"

#include "ldm3d/image_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace ldm3d {

namespace {

using nlohmann::json;

constexpr const char *kSceneFile = "scene.json";
constexpr const char *kTextureFile = "texture.png";
constexpr const char *kDepthFile = "depth.png";

json describe(const SphereMesh &mesh) {
    return {
        {"version", kSceneVersion},
        {"tessellation", {{"rows", mesh.rows()}, {"cols", mesh.cols()}}},
        {"base_radius", mesh.base_radius()},
        {"strength", mesh.strength()},
        {"displacement",
         {{"formula", "r' = r * (1 + k * (1 - 2 * d))"},
          {"min_radius_fraction", kMinRadiusFraction},
          {"depth_normalization", 65535},
          {"sampling", "bilinear, texel centres at (i + 0.5) / size, u wraps, v clamps"},
          {"poles", "mean of the first / last depth row"}}},
        {"axes",
         {{"handedness", "right"},
          {"up", "+Y"},
          {"longitude_zero", "+X"},
          {"longitude_increases_toward", "+Z"},
          {"latitude", "polar angle from +Y"}}},
        {"uv",
         {{"u", "longitude / (2 pi)"},
          {"v", "latitude / pi, row 0 = north pole"},
          {"pole_u", "(j + 0.5) / cols"}}},
        {"assets", {{"texture", kTextureFile}, {"depth", kDepthFile}}},
    };
}

} // namespace

void export_scene(const SphereMesh &mesh, const EquirectImage &texture, const DepthMap16 *depth,
                  const std::filesystem::path &out_dir) {
    if (depth == nullptr) {
        throw Error(ErrorCode::MissingAsset, "a scene bundle needs the depth map");
    }
    if (mesh.displacement_passes() > 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "mesh was displaced more than once; a bundle records a single displacement");
    }
    // The viewer rebuilds geometry from the depth file, so it must be the map
    // that produced these radii.
    const SphereMesh rebuilt =
        displace_vertices(SphereMesh(mesh.rows(), mesh.cols(), mesh.base_radius()), *depth,
                          mesh.strength());
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        if (rebuilt.radii()[i] != mesh.radii()[i]) {
            throw Error(ErrorCode::InvalidArgument,
                        "depth map does not reproduce the mesh displacement");
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
    }
    write_rgb_png(out_dir / kTextureFile, texture.image());
    write_depth_png(out_dir / kDepthFile, *depth);
    std::ofstream out(out_dir / kSceneFile);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + (out_dir / kSceneFile).string());
    }
    out << describe(mesh).dump(2) << '\n';
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + (out_dir / kSceneFile).string());
    }
}

SceneBundle import_scene(const std::filesystem::path &dir) {
    const auto scene_path = dir / kSceneFile;
    std::ifstream in(scene_path);
    if (!in) {
        throw Error(ErrorCode::MissingAsset, "no " + scene_path.string());
    }
    json scene;
    try {
        scene = json::parse(in);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::FormatError, scene_path.string() + ": " + e.what());
    }
    if (!scene.is_object() || !scene.contains("version") || !scene["version"].is_number_integer()) {
        throw Error(ErrorCode::FormatError, scene_path.string() + ": missing integer version");
    }
    if (scene["version"].get<int>() != kSceneVersion) {
        throw Error(ErrorCode::VersionMismatch,
                    "scene version " + scene["version"].dump() + " is not supported");
    }
    std::size_t rows = 0;
    std::size_t cols = 0;
    double radius = 0.0;
    double strength = 0.0;
    std::string texture_name;
    std::string depth_name;
    try {
        rows = scene.at("tessellation").at("rows").get<std::size_t>();
        cols = scene.at("tessellation").at("cols").get<std::size_t>();
        radius = scene.at("base_radius").get<double>();
        strength = scene.at("strength").get<double>();
        texture_name = scene.at("assets").at("texture").get<std::string>();
        depth_name = scene.at("assets").at("depth").get<std::string>();
    } catch (const json::exception &e) {
        throw Error(ErrorCode::FormatError, scene_path.string() + ": " + e.what());
    }
    for (const auto &name : {texture_name, depth_name}) {
        const std::filesystem::path asset(name);
        if (name.empty() || name == "." || name == ".." || asset.filename() != asset) {
            throw Error(ErrorCode::FormatError, "asset '" + name + "' must be a plain file name");
        }
        if (!std::filesystem::exists(dir / name)) {
            throw Error(ErrorCode::MissingAsset, "bundle lacks " + (dir / name).string());
        }
    }
    RgbImage texture = read_rgb_png(dir / texture_name);
    DepthMap16 depth = read_depth_png(dir / depth_name);
    SphereMesh mesh = displace_vertices(SphereMesh(rows, cols, radius), depth, strength);
    return {std::move(mesh), std::move(texture), std::move(depth)};
}

} // namespace ldm3d
