// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/gen_metrics.hpp"

#include "ldm3d/binary_io.hpp"
#include "ldm3d/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace ldm3d {

namespace {

MeanStd mean_and_std(std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) {
        var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

/// KL(p || q) with 0 * log(0 / q) = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q) {
    double kl = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0 && p[j] != q[j]) {
            kl += p[j] * (std::log(p[j]) - std::log(q[j]));
        }
    }
    return kl;
}

} // namespace

FeatureSet::FeatureSet(std::size_t n, std::size_t d, std::vector<double> rows)
    : n_(n), d_(d), rows_(std::move(rows)) {
    if (d == 0) {
        throw Error(ErrorCode::InvalidArgument, "feature dimension must be positive");
    }
    if (rows_.size() != n * d) {
        throw Error(ErrorCode::DimensionMismatch, "feature buffer does not hold n*d values");
    }
    for (double v : rows_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "feature values must be finite");
        }
    }
}

ProbabilitySet::ProbabilitySet(std::size_t n, std::size_t k, std::vector<double> rows)
    : n_(n), k_(k), rows_(std::move(rows)) {
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "class count must be positive");
    }
    if (rows_.size() != n * k) {
        throw Error(ErrorCode::DimensionMismatch, "probability buffer does not hold n*k values");
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (double p : row(i)) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw Error(ErrorCode::InvalidArgument,
                            "row " + std::to_string(i) + " has a negative or non-finite entry");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw Error(ErrorCode::InvalidArgument,
                        "row " + std::to_string(i) + " sums to " + std::to_string(sum));
        }
    }
}

ProbabilitySet ProbabilitySet::from_logits(const FeatureSet &logits) {
    std::vector<double> probs(logits.values().begin(), logits.values().end());
    const std::size_t k = logits.d();
    for (std::size_t i = 0; i < logits.n(); ++i) {
        double *row = probs.data() + i * k;
        const double peak = *std::max_element(row, row + k);
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row[j] = std::exp(row[j] - peak);
            sum += row[j];
        }
        for (std::size_t j = 0; j < k; ++j) {
            row[j] /= sum;
        }
    }
    return ProbabilitySet(logits.n(), k, std::move(probs));
}

GaussianStats gaussian_stats(const FeatureSet &features) {
    const std::size_t n = features.n();
    const std::size_t d = features.d();
    if (n < 2) {
        throw Error(ErrorCode::TooFewSamples, "covariance needs at least two samples");
    }
    GaussianStats stats{std::vector<double>(d, 0.0), SquareMatrix(d)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            stats.mean[j] += row[j];
        }
    }
    for (double &m : stats.mean) {
        m /= static_cast<double>(n);
    }
    std::vector<double> centred(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            centred[j] = row[j] - stats.mean[j];
        }
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = r; c < d; ++c) {
                stats.cov(r, c) += centred[r] * centred[c];
            }
        }
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r; c < d; ++c) {
            stats.cov(r, c) /= denom;
            stats.cov(c, r) = stats.cov(r, c);
        }
    }
    return stats;
}

double frechet_distance(const GaussianStats &a, const GaussianStats &b) {
    if (a.mean.size() != b.mean.size() || a.cov.size() != b.cov.size() ||
        a.mean.size() != a.cov.size()) {
        throw Error(ErrorCode::DimensionMismatch, "Gaussian statistics differ in dimension");
    }
    double mean_term = 0.0;
    for (std::size_t j = 0; j < a.mean.size(); ++j) {
        const double diff = a.mean[j] - b.mean[j];
        mean_term += diff * diff;
    }
    const SquareMatrix root_a = sqrt_psd(a.cov);
    const SquareMatrix inner = root_a * b.cov * root_a;
    double trace_root = 0.0;
    for (double lambda : jacobi_eigen(inner).values) {
        trace_root += std::sqrt(std::max(lambda, 0.0));
    }
    const double fid = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * trace_root;
    return std::max(fid, 0.0);
}

MeanStd inception_score(const ProbabilitySet &probs, std::size_t splits) {
    const std::size_t n = probs.n();
    const std::size_t k = probs.k();
    if (n == 0) {
        throw Error(ErrorCode::EmptySet, "no predictions to score");
    }
    if (splits == 0 || splits > n) {
        throw Error(ErrorCode::InvalidArgument,
                    "split count must be in [1, n], got " + std::to_string(splits));
    }
    const std::size_t base = n / splits;
    std::vector<double> scores;
    scores.reserve(splits);
    std::vector<double> marginal(k);
    for (std::size_t s = 0; s < splits; ++s) {
        const std::size_t begin = s * base;
        const std::size_t end = s + 1 == splits ? n : begin + base;
        // Running mean: a split of identical rows has a marginal exactly
        // equal to the row, so its KL terms vanish exactly.
        std::fill(marginal.begin(), marginal.end(), 0.0);
        for (std::size_t i = begin; i < end; ++i) {
            const auto row = probs.row(i);
            const double w = 1.0 / static_cast<double>(i - begin + 1);
            for (std::size_t j = 0; j < k; ++j) {
                marginal[j] += (row[j] - marginal[j]) * w;
            }
        }
        double kl_sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            kl_sum += kl_divergence(probs.row(i), marginal);
        }
        scores.push_back(std::exp(kl_sum / static_cast<double>(end - begin)));
    }
    return mean_and_std(scores);
}

MeanStd clip_similarity(const FeatureSet &image_features, const FeatureSet &text_features) {
    if (image_features.n() != text_features.n() || image_features.d() != text_features.d()) {
        throw Error(ErrorCode::DimensionMismatch, "image and text feature sets differ in shape");
    }
    if (image_features.n() == 0) {
        throw Error(ErrorCode::EmptySet, "no feature pairs");
    }
    std::vector<double> scores(image_features.n());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto a = image_features.row(i);
        const auto b = text_features.row(i);
        double dot = 0.0;
        double na = 0.0;
        double nb = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            dot += a[j] * b[j];
            na += a[j] * a[j];
            nb += b[j] * b[j];
        }
        if (na == 0.0 || nb == 0.0) {
            throw Error(ErrorCode::ZeroVector, "pair " + std::to_string(i) + " has a zero row");
        }
        scores[i] = 100.0 * std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
    }
    return mean_and_std(scores);
}

FeatureSet read_features(const std::filesystem::path &path) {
    if (path.extension() == ".feat") {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error(ErrorCode::IoError, "cannot open " + path.string());
        }
        std::uint32_t n = 0;
        std::uint32_t d = 0;
        if (!binary::get_u32(in, n) || !binary::get_u32(in, d)) {
            throw Error(ErrorCode::FormatError, path.string() + ": truncated header");
        }
        std::vector<double> rows(static_cast<std::size_t>(n) * d);
        for (double &v : rows) {
            float f = 0.0f;
            if (!binary::get_f32(in, f)) {
                throw Error(ErrorCode::FormatError, path.string() + ": truncated payload");
            }
            v = f;
        }
        if (in.peek() != std::char_traits<char>::eof()) {
            throw Error(ErrorCode::FormatError, path.string() + ": trailing bytes after rows");
        }
        return FeatureSet(n, d, std::move(rows));
    }

    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::size_t n = 0;
    std::size_t d = 0;
    if (!(in >> n >> d)) {
        throw Error(ErrorCode::FormatError, path.string() + ": missing 'n d' header");
    }
    std::vector<double> rows(n * d);
    for (double &v : rows) {
        if (!(in >> v)) {
            throw Error(ErrorCode::FormatError, path.string() + ": expected " +
                                                    std::to_string(n * d) + " values");
        }
    }
    std::string extra;
    if (in >> extra) {
        throw Error(ErrorCode::FormatError, path.string() + ": trailing data after rows");
    }
    return FeatureSet(n, d, std::move(rows));
}

void write_features(const std::filesystem::path &path, const FeatureSet &features) {
    if (path.extension() == ".feat") {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
        }
        binary::put_u32(out, static_cast<std::uint32_t>(features.n()));
        binary::put_u32(out, static_cast<std::uint32_t>(features.d()));
        for (double v : features.values()) {
            binary::put_f32(out, static_cast<float>(v));
        }
        if (!out) {
            throw Error(ErrorCode::IoError, "write failed for " + path.string());
        }
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    out.precision(17);
    out << features.n() << ' ' << features.d() << '\n';
    for (std::size_t i = 0; i < features.n(); ++i) {
        const auto row = features.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << (j ? " " : "") << row[j];
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

} // namespace ldm3d
