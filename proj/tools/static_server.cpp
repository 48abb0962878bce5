// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/static_server.hpp"

#include "ldm3d/error.hpp"

#include <httplib.h>

namespace ldm3d {

std::unique_ptr<httplib::Server> make_static_server(
    const std::filesystem::path &bundle_dir,
    const std::optional<std::filesystem::path> &assets_dir) {
    auto server = std::make_unique<httplib::Server>();
    server->set_file_extension_and_mimetype_mapping("json", "application/json");
    if (!server->set_mount_point("/scene", bundle_dir.string())) {
        throw Error(ErrorCode::MissingAsset, "bundle directory " + bundle_dir.string() +
                                                 " does not exist");
    }
    if (assets_dir && !server->set_mount_point("/", assets_dir->string())) {
        throw Error(ErrorCode::MissingAsset, "asset directory " + assets_dir->string() +
                                                 " does not exist");
    }
    return server;
}

} // namespace ldm3d
