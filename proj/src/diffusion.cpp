// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/diffusion.hpp"

#include "ldm3d/error.hpp"

#include <cmath>
#include <string>

namespace ldm3d {

NoiseSchedule make_noise_schedule(std::size_t steps, double beta_min, double beta_max) {
    if (steps == 0) {
        throw Error(ErrorCode::InvalidRange, "schedule needs at least one step");
    }
    if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
        throw Error(ErrorCode::InvalidRange, "need 0 < beta_min <= beta_max < 1");
    }
    if (steps == 1 && beta_min != beta_max) {
        throw Error(ErrorCode::InvalidRange, "a single-step schedule needs beta_min == beta_max");
    }
    NoiseSchedule s;
    s.steps = steps;
    s.beta_min = beta_min;
    s.beta_max = beta_max;
    s.betas.resize(steps);
    s.alphas.resize(steps);
    s.alpha_bars.resize(steps);
    double running = 1.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const double frac = steps == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(steps - 1);
        s.betas[t] = beta_min + (beta_max - beta_min) * frac;
        s.alphas[t] = 1.0 - s.betas[t];
        running *= s.alphas[t];
        s.alpha_bars[t] = running;
    }
    return s;
}

LatentTensor::LatentTensor(std::size_t h, std::size_t w, double fill)
    : h_(h), w_(w), data_(h * w * channels, fill) {
    if (h == 0 || w == 0) {
        throw Error(ErrorCode::ShapeMismatch, "latent dimensions must be positive");
    }
}

LatentTensor::LatentTensor(std::size_t h, std::size_t w, std::vector<double> data)
    : h_(h), w_(w), data_(std::move(data)) {
    if (h == 0 || w == 0) {
        throw Error(ErrorCode::ShapeMismatch, "latent dimensions must be positive");
    }
    if (data_.size() != h * w * channels) {
        throw Error(ErrorCode::ShapeMismatch, "latent buffer does not hold h*w*4 values");
    }
}

LatentTensor forward_diffuse(const LatentTensor &z0, std::size_t t, const LatentTensor &eps,
                             const NoiseSchedule &schedule) {
    if (!z0.same_shape(eps)) {
        throw Error(ErrorCode::ShapeMismatch, "latent and noise shapes differ");
    }
    if (t >= schedule.steps) {
        throw Error(ErrorCode::InvalidRange,
                    "timestep " + std::to_string(t) + " outside schedule of " +
                        std::to_string(schedule.steps));
    }
    const double signal = std::sqrt(schedule.alpha_bars[t]);
    const double noise = std::sqrt(1.0 - schedule.alpha_bars[t]);
    LatentTensor zt(z0.height(), z0.width());
    for (std::size_t i = 0; i < zt.size(); ++i) {
        zt[i] = signal * z0[i] + noise * eps[i];
    }
    return zt;
}

double ldm3d_loss(const LatentTensor &eps_pred, const LatentTensor &eps) {
    if (!eps_pred.same_shape(eps)) {
        throw Error(ErrorCode::ShapeMismatch, "prediction and target shapes differ");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double d = eps_pred[i] - eps[i];
        sum += d * d;
    }
    return sum / static_cast<double>(eps.size());
}

double kl_regularization(std::span<const double> mu, std::span<const double> logvar) {
    if (mu.size() != logvar.size()) {
        throw Error(ErrorCode::ShapeMismatch, "mu and logvar differ in length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        sum += mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i];
    }
    return 0.5 * sum;
}

double log_sigmoid(double x) {
    return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double autoencoder_loss(double rec, double adv, double disc_logit, double reg, double reg_weight) {
    return rec - adv + log_sigmoid(disc_logit) + reg_weight * reg;
}

} // namespace ldm3d
