// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/error.hpp"

namespace ldm3d {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::NoValidPixels: return "NoValidPixels";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InvalidTessellation: return "InvalidTessellation";
    case ErrorCode::ViewpointOutsideMesh: return "ViewpointOutsideMesh";
    case ErrorCode::MissingAsset: return "MissingAsset";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace ldm3d
