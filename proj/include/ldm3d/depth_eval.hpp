// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/depth_codec.hpp"
#include "ldm3d/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ldm3d {

struct DisparityTag;
struct MetricDepthTag;
struct MaskTag;

/// Inverse depth up to an unknown affine transform. Negative or non-finite
/// values are legal and simply fail the validity test.
using DisparityMap = Grid<double, 1, DisparityTag>;
/// Depth in meters.
using MetricDepthMap = Grid<double, 1, MetricDepthTag>;
/// One byte per pixel, 1 = valid.
using ValidityMask = Grid<std::uint8_t, 1, MaskTag>;

inline constexpr std::size_t kDefaultFitPoints = 10000;
inline constexpr double kDefaultDisparityFloor = 1e-6;
/// Population variance of the sampled estimate below which no fit is made.
inline constexpr double kDegenerateVariance = 1e-12;

struct ScaleShift {
    double scale = 1.0;
    double shift = 0.0;
};

struct DepthMetrics {
    double abs_rel = 0.0;
    double rmse = 0.0;
    std::size_t n_valid = 0;
};

/// Valid iff the value is finite and non-negative.
ValidityMask compute_validity_mask(const DisparityMap &disparity);

ValidityMask intersect(const ValidityMask &a, const ValidityMask &b);

/// Draws min(n, |a AND b|) distinct pixel indices uniformly from the
/// intersection of both masks. The draw order is a function of the seed only.
std::vector<std::size_t> sample_fit_points(const ValidityMask &mask_est,
                                           const ValidityMask &mask_ref, std::size_t n,
                                           std::uint64_t seed);

/// Least-squares (scale, shift) minimising sum (scale*est + shift - ref)^2
/// over the given pixels.
ScaleShift fit_scale_shift(const DisparityMap &est, const DisparityMap &ref,
                           std::span<const std::size_t> points);

struct AlignedDepth {
    MetricDepthMap depth;
    /// False where the aligned disparity was non-positive or non-finite.
    ValidityMask valid;
};

/// depth = 1 / max(scale*d + shift, eps), flagging pixels that needed the floor.
AlignedDepth align_and_invert(const DisparityMap &disparity, const ScaleShift &fit,
                              double eps = kDefaultDisparityFloor);

DepthMetrics depth_metrics(const MetricDepthMap &pred, const MetricDepthMap &ref,
                           const ValidityMask &mask);

struct EvalOptions {
    std::size_t fit_points = kDefaultFitPoints;
    std::uint64_t seed = 0;
    double eps = kDefaultDisparityFloor;
};

struct PairEvaluation {
    ScaleShift fit;
    DepthMetrics metrics;
};

/// Full protocol for one image: validity masks, sampled fit of the estimate
/// onto the reference in disparity space, inversion of both maps to metric
/// depth and AbsRel/RMSE over pixels valid in both.
PairEvaluation evaluate_pair(const DisparityMap &est, const DisparityMap &ref,
                             const EvalOptions &options);

struct NamedEvaluation {
    std::string name;
    PairEvaluation result;
};

struct DatasetSummary {
    double abs_rel = 0.0;
    double rmse = 0.0;
    std::size_t n_images = 0;
};

/// Unweighted mean of per-image metrics, reduced in name order.
DatasetSummary summarize(std::vector<NamedEvaluation> evaluations);

/// 16-bit depth codes read as disparity, normalised by 65535.
DisparityMap disparity_from_depth16(const DepthMap16 &depth);

} // namespace ldm3d
