// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/depth_eval.hpp"

#include "ldm3d/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ldm3d {

ValidityMask compute_validity_mask(const DisparityMap &disparity) {
    ValidityMask mask(disparity.width(), disparity.height());
    const auto src = disparity.values();
    auto dst = mask.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = std::isfinite(src[i]) && src[i] >= 0.0;
    }
    return mask;
}

ValidityMask intersect(const ValidityMask &a, const ValidityMask &b) {
    if (!a.same_size(b)) {
        throw Error(ErrorCode::DimensionMismatch, "validity masks differ in size");
    }
    ValidityMask out(a.width(), a.height());
    const auto av = a.values();
    const auto bv = b.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = av[i] && bv[i];
    }
    return out;
}

std::vector<std::size_t> sample_fit_points(const ValidityMask &mask_est,
                                           const ValidityMask &mask_ref, std::size_t n,
                                           std::uint64_t seed) {
    const ValidityMask both = intersect(mask_est, mask_ref);
    std::vector<std::size_t> candidates;
    const auto flags = both.values();
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) {
            candidates.push_back(i);
        }
    }
    if (candidates.empty()) {
        throw Error(ErrorCode::EmptyIntersection, "no pixel is valid in both maps");
    }
    // Partial Fisher-Yates: the first `take` slots end up a uniform sample.
    const std::size_t take = std::min(n, candidates.size());
    Rng rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(take);
    return candidates;
}

ScaleShift fit_scale_shift(const DisparityMap &est, const DisparityMap &ref,
                           std::span<const std::size_t> points) {
    if (!est.same_size(ref)) {
        throw Error(ErrorCode::DimensionMismatch, "estimate and reference differ in size");
    }
    if (points.size() < 2) {
        throw Error(ErrorCode::DegenerateFit, "need at least two fit points");
    }
    const auto e = est.values();
    const auto r = ref.values();
    const double count = static_cast<double>(points.size());
    double sum_e = 0.0;
    double sum_r = 0.0;
    for (std::size_t idx : points) {
        if (idx >= e.size()) {
            throw Error(ErrorCode::InvalidArgument, "fit point index out of range");
        }
        sum_e += e[idx];
        sum_r += r[idx];
    }
    const double mean_e = sum_e / count;
    const double mean_r = sum_r / count;
    // Centred sums: the normal equations reduce to scale = Sxy / Sxx.
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t idx : points) {
        const double de = e[idx] - mean_e;
        sxx += de * de;
        sxy += de * (r[idx] - mean_r);
    }
    if (!(sxx / count >= kDegenerateVariance)) {
        throw Error(ErrorCode::DegenerateFit, "estimate is constant over the fit points");
    }
    const double scale = sxy / sxx;
    return {scale, mean_r - scale * mean_e};
}

AlignedDepth align_and_invert(const DisparityMap &disparity, const ScaleShift &fit, double eps) {
    if (!(eps > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "disparity floor must be positive");
    }
    AlignedDepth out{MetricDepthMap(disparity.width(), disparity.height()),
                     ValidityMask(disparity.width(), disparity.height())};
    const auto src = disparity.values();
    auto depth = out.depth.values();
    auto valid = out.valid.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double aligned = fit.scale * src[i] + fit.shift;
        const bool ok = std::isfinite(aligned) && aligned > 0.0;
        valid[i] = ok;
        depth[i] = 1.0 / (ok ? std::max(aligned, eps) : eps);
    }
    return out;
}

DepthMetrics depth_metrics(const MetricDepthMap &pred, const MetricDepthMap &ref,
                           const ValidityMask &mask) {
    if (!pred.same_size(ref) || !pred.same_size(mask)) {
        throw Error(ErrorCode::DimensionMismatch, "prediction, reference and mask differ in size");
    }
    const auto p = pred.values();
    const auto r = ref.values();
    const auto m = mask.values();
    double abs_rel_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!m[i]) {
            continue;
        }
        if (!(r[i] > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "reference depth must be positive where valid");
        }
        const double diff = p[i] - r[i];
        abs_rel_sum += std::abs(diff) / r[i];
        sq_sum += diff * diff;
        ++n;
    }
    if (n == 0) {
        throw Error(ErrorCode::NoValidPixels, "mask selects no pixels");
    }
    const double count = static_cast<double>(n);
    return {abs_rel_sum / count, std::sqrt(sq_sum / count), n};
}

PairEvaluation evaluate_pair(const DisparityMap &est, const DisparityMap &ref,
                             const EvalOptions &options) {
    if (!est.same_size(ref)) {
        throw Error(ErrorCode::DimensionMismatch, "estimate and reference differ in size");
    }
    const ValidityMask est_mask = compute_validity_mask(est);
    const ValidityMask ref_mask = compute_validity_mask(ref);
    const auto points = sample_fit_points(est_mask, ref_mask, options.fit_points, options.seed);
    const ScaleShift fit = fit_scale_shift(est, ref, points);

    const AlignedDepth pred = align_and_invert(est, fit, options.eps);
    const AlignedDepth target = align_and_invert(ref, ScaleShift{1.0, 0.0}, options.eps);
    const ValidityMask mask = intersect(intersect(pred.valid, target.valid),
                                        intersect(est_mask, ref_mask));
    return {fit, depth_metrics(pred.depth, target.depth, mask)};
}

DatasetSummary summarize(std::vector<NamedEvaluation> evaluations) {
    if (evaluations.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no evaluations to summarize");
    }
    std::sort(evaluations.begin(), evaluations.end(),
              [](const NamedEvaluation &a, const NamedEvaluation &b) { return a.name < b.name; });
    DatasetSummary summary;
    for (const auto &e : evaluations) {
        summary.abs_rel += e.result.metrics.abs_rel;
        summary.rmse += e.result.metrics.rmse;
    }
    summary.n_images = evaluations.size();
    summary.abs_rel /= static_cast<double>(summary.n_images);
    summary.rmse /= static_cast<double>(summary.n_images);
    return summary;
}

DisparityMap disparity_from_depth16(const DepthMap16 &depth) {
    DisparityMap out(depth.width(), depth.height());
    const auto src = depth.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] / 65535.0;
    }
    return out;
}

} // namespace ldm3d
