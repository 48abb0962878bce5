// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldm3d {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    ShapeMismatch,
    EmptyIntersection,
    DegenerateFit,
    NoValidPixels,
    TooFewSamples,
    EmptySet,
    EmptyDataset,
    ZeroVector,
    InvalidRange,
    ConfigInvalid,
    InvalidTessellation,
    ViewpointOutsideMesh,
    MissingAsset,
    VersionMismatch,
    FormatError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the toolkit is reported as an Error carrying
/// a code, so callers (and the CLI exit-code mapping) can branch on kind.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ldm3d
