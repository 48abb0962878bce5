// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ldm3d {

/// Forward-process coefficients of a linear beta schedule.
struct NoiseSchedule {
    std::size_t steps = 0;
    double beta_min = 0.0;
    double beta_max = 0.0;
    std::vector<double> betas;
    std::vector<double> alphas;
    std::vector<double> alpha_bars;
};

inline constexpr std::size_t kDefaultScheduleSteps = 1000;
inline constexpr double kDefaultBetaMin = 1e-4;
inline constexpr double kDefaultBetaMax = 0.02;

NoiseSchedule make_noise_schedule(std::size_t steps = kDefaultScheduleSteps,
                                  double beta_min = kDefaultBetaMin,
                                  double beta_max = kDefaultBetaMax);

/// h x w x 4 latent, channel-last.
class LatentTensor {
public:
    static constexpr std::size_t channels = 4;

    LatentTensor() = default;
    LatentTensor(std::size_t h, std::size_t w, double fill = 0.0);
    LatentTensor(std::size_t h, std::size_t w, std::vector<double> data);

    std::size_t height() const noexcept { return h_; }
    std::size_t width() const noexcept { return w_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool same_shape(const LatentTensor &o) const noexcept { return h_ == o.h_ && w_ == o.w_; }

    double &operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    friend bool operator==(const LatentTensor &, const LatentTensor &) = default;

private:
    std::size_t h_ = 0;
    std::size_t w_ = 0;
    std::vector<double> data_;
};

/// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps.
LatentTensor forward_diffuse(const LatentTensor &z0, std::size_t t, const LatentTensor &eps,
                             const NoiseSchedule &schedule);

/// Noise-prediction objective, averaged over elements.
double ldm3d_loss(const LatentTensor &eps_pred, const LatentTensor &eps);

/// KL(N(mu, exp(logvar)) || N(0, I)) summed over dimensions.
double kl_regularization(std::span<const double> mu, std::span<const double> logvar);

/// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x);

/// Composes the autoencoder objective from externally computed terms:
/// rec - adv + log sigmoid(disc_logit) + reg_weight * reg.
double autoencoder_loss(double rec, double adv, double disc_logit, double reg, double reg_weight);

} // namespace ldm3d
