// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace ldm3d {

/// n x d matrix of embeddings (Inception pool features, CLIP embeddings,
/// flattened latents, ...), row-major.
class FeatureSet {
public:
    FeatureSet() = default;
    FeatureSet(std::size_t n, std::size_t d, std::vector<double> rows);

    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }
    std::span<const double> row(std::size_t i) const { return {rows_.data() + i * d_, d_}; }
    std::span<const double> values() const noexcept { return rows_; }

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> rows_;
};

/// Per-sample class posteriors; each row is non-negative and sums to 1.
class ProbabilitySet {
public:
    static constexpr double kRowSumTolerance = 1e-9;

    ProbabilitySet() = default;
    ProbabilitySet(std::size_t n, std::size_t k, std::vector<double> rows);

    /// Row-wise softmax of raw logits.
    static ProbabilitySet from_logits(const FeatureSet &logits);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    std::span<const double> row(std::size_t i) const { return {rows_.data() + i * k_, k_}; }

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<double> rows_;
};

struct GaussianStats {
    std::vector<double> mean;
    SquareMatrix cov;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

inline constexpr std::size_t kDefaultIsSplits = 10;

/// Column means and unbiased (n-1) covariance.
GaussianStats gaussian_stats(const FeatureSet &features);

/// |mu_a - mu_b|^2 + Tr(Ca + Cb - 2 (Ca^1/2 Cb Ca^1/2)^1/2), clamped at 0.
double frechet_distance(const GaussianStats &a, const GaussianStats &b);

/// exp(E_x KL(p(y|x) || p(y))) per split, reported as mean and population
/// std across splits. The last split absorbs the remainder of n / splits.
MeanStd inception_score(const ProbabilitySet &probs, std::size_t splits = kDefaultIsSplits);

/// 100 * cosine(img_i, txt_i), mean and population std over pairs.
MeanStd clip_similarity(const FeatureSet &image_features, const FeatureSet &text_features);

// Feature files. Text: "n d" header then n rows of d numbers. Binary (.feat):
// u32 n, u32 d, then n*d float32, little-endian.
FeatureSet read_features(const std::filesystem::path &path);
void write_features(const std::filesystem::path &path, const FeatureSet &features);

} // namespace ldm3d
