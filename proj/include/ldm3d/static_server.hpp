// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>

namespace httplib {
class Server;
}

namespace ldm3d {

/// Read-only file server for the web viewer: the scene bundle is mounted at
/// /scene/ and, when given, viewer assets at /. No other routes exist.
std::unique_ptr<httplib::Server> make_static_server(
    const std::filesystem::path &bundle_dir,
    const std::optional<std::filesystem::path> &assets_dir);

} // namespace ldm3d
