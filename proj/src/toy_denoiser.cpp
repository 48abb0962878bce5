// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/toy_denoiser.hpp"

#include "ldm3d/adam.hpp"
#include "ldm3d/error.hpp"
#include "ldm3d/rng.hpp"

#include <algorithm>
#include <string>

namespace ldm3d {

namespace {

/// Fills `x` with [z_t; t/T; cond; 1].
void build_input(const LatentTensor &zt, std::size_t t, bool cond, std::size_t steps,
                 std::vector<double> &x) {
    const auto z = zt.values();
    x.assign(z.begin(), z.end());
    x.push_back(static_cast<double>(t) / static_cast<double>(steps));
    x.push_back(cond ? 1.0 : 0.0);
    x.push_back(1.0);
}

} // namespace

DenoiserModel::DenoiserModel(std::size_t latent_h, std::size_t latent_w,
                             std::size_t schedule_steps)
    : h_(latent_h), w_(latent_w), steps_(schedule_steps) {
    if (latent_h == 0 || latent_w == 0 || schedule_steps == 0) {
        throw Error(ErrorCode::ShapeMismatch, "denoiser dimensions must be positive");
    }
    weights_.assign(latent_dim() * input_dim(), 0.0);
}

DenoiserModel::DenoiserModel(std::size_t latent_h, std::size_t latent_w,
                             std::size_t schedule_steps, std::vector<double> weights)
    : DenoiserModel(latent_h, latent_w, schedule_steps) {
    if (weights.size() != weights_.size()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "denoiser expects " + std::to_string(weights_.size()) + " weights");
    }
    weights_ = std::move(weights);
}

LatentTensor DenoiserModel::predict(const LatentTensor &zt, std::size_t t, bool cond) const {
    if (zt.height() != h_ || zt.width() != w_) {
        throw Error(ErrorCode::ShapeMismatch, "latent shape does not match the denoiser");
    }
    std::vector<double> x;
    build_input(zt, t, cond, steps_, x);
    LatentTensor out(h_, w_);
    const std::size_t in = input_dim();
    for (std::size_t r = 0; r < latent_dim(); ++r) {
        const double *w = weights_.data() + r * in;
        double v = 0.0;
        for (std::size_t c = 0; c < in; ++c) {
            v += w[c] * x[c];
        }
        out[r] = v;
    }
    return out;
}

DenoiserObjective denoiser_objective(const DenoiserModel &model,
                                     std::span<const DenoiserDraw> draws, bool with_gradient) {
    if (draws.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no draws to evaluate");
    }
    const std::size_t dim = model.latent_dim();
    const std::size_t in = model.input_dim();
    DenoiserObjective obj;
    if (with_gradient) {
        obj.gradient.assign(dim * in, 0.0);
    }
    std::vector<double> x;
    const double scale = 2.0 / static_cast<double>(dim);
    for (const DenoiserDraw &draw : draws) {
        const LatentTensor pred = model.predict(draw.zt, draw.t, draw.cond);
        obj.loss += ldm3d_loss(pred, draw.eps);
        if (!with_gradient) {
            continue;
        }
        build_input(draw.zt, draw.t, draw.cond, model.schedule_steps(), x);
        for (std::size_t r = 0; r < dim; ++r) {
            const double d = scale * (pred[r] - draw.eps[r]);
            double *g = obj.gradient.data() + r * in;
            for (std::size_t c = 0; c < in; ++c) {
                g[c] += d * x[c];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(draws.size());
    obj.loss *= inv;
    for (double &g : obj.gradient) {
        g *= inv;
    }
    return obj;
}

DenoiserTrainResult train_toy_denoiser(std::span<const LatentTensor> latents,
                                       const NoiseSchedule &schedule,
                                       const DenoiserTrainOptions &options,
                                       std::span<const std::uint8_t> cond_labels) {
    if (latents.empty()) {
        throw Error(ErrorCode::EmptyDataset, "denoiser training needs at least one latent");
    }
    if (!cond_labels.empty() && cond_labels.size() != latents.size()) {
        throw Error(ErrorCode::ShapeMismatch, "one condition label per latent is required");
    }
    if (options.batch == 0 || !(options.learning_rate >= 0.0) ||
        !(options.uncond_prob >= 0.0 && options.uncond_prob <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "invalid denoiser training options");
    }
    const LatentTensor &first = latents.front();
    for (const auto &z : latents) {
        if (!z.same_shape(first)) {
            throw Error(ErrorCode::ShapeMismatch, "all latents must share one shape");
        }
    }

    DenoiserTrainResult result{DenoiserModel(first.height(), first.width(), schedule.steps), {}};
    AdamState adam(result.model.weights().size(), options.learning_rate);
    Rng rng(options.seed);
    std::vector<DenoiserDraw> batch(options.batch);
    result.loss_history.reserve(options.steps);

    for (std::size_t step = 0; step < options.steps; ++step) {
        for (DenoiserDraw &draw : batch) {
            const std::size_t i = rng.below(latents.size());
            draw.t = rng.below(schedule.steps);
            // The dropout draw is consumed unconditionally so the random
            // stream does not depend on label values.
            const bool keep = rng.uniform() >= options.uncond_prob;
            draw.cond = !cond_labels.empty() && cond_labels[i] != 0 && keep;
            draw.eps = LatentTensor(first.height(), first.width());
            for (double &e : draw.eps.values()) {
                e = rng.normal();
            }
            draw.zt = forward_diffuse(latents[i], draw.t, draw.eps, schedule);
        }
        const auto obj = denoiser_objective(result.model, batch, true);
        result.loss_history.push_back(obj.loss);
        adam.step(result.model.weights(), obj.gradient);
    }
    return result;
}

LossTrend loss_trend(std::span<const double> history, std::size_t window) {
    if (history.empty() || window == 0) {
        throw Error(ErrorCode::EmptySet, "loss history is empty");
    }
    window = std::min(window, history.size());
    LossTrend trend;
    for (std::size_t i = 0; i < window; ++i) {
        trend.initial += history[i];
        trend.final += history[history.size() - window + i];
    }
    trend.initial /= static_cast<double>(window);
    trend.final /= static_cast<double>(window);
    return trend;
}

} // namespace ldm3d
