// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/diffusion.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ldm3d {

/// Anything that predicts the injected noise of z_t. The sampler only talks
/// to this interface, so analytic oracles can stand in for a trained model.
class NoisePredictor {
public:
    virtual ~NoisePredictor() = default;
    virtual LatentTensor predict(const LatentTensor &zt, std::size_t t, bool cond) const = 0;
};

/// Linear epsilon-predictor: eps = W [z_t; t/T; cond; 1].
///
/// The input is the flattened latent followed by the time embedding t/T,
/// the condition flag (1 = conditioned, 0 = null condition) and a constant
/// bias input. W is D x (D + 3), row-major.
class DenoiserModel final : public NoisePredictor {
public:
    static constexpr std::size_t kExtraInputs = 3;

    DenoiserModel() = default;
    DenoiserModel(std::size_t latent_h, std::size_t latent_w, std::size_t schedule_steps);
    DenoiserModel(std::size_t latent_h, std::size_t latent_w, std::size_t schedule_steps,
                  std::vector<double> weights);

    std::size_t latent_height() const noexcept { return h_; }
    std::size_t latent_width() const noexcept { return w_; }
    std::size_t latent_dim() const noexcept { return h_ * w_ * LatentTensor::channels; }
    std::size_t input_dim() const noexcept { return latent_dim() + kExtraInputs; }
    std::size_t schedule_steps() const noexcept { return steps_; }

    std::span<double> weights() noexcept { return weights_; }
    std::span<const double> weights() const noexcept { return weights_; }

    LatentTensor predict(const LatentTensor &zt, std::size_t t, bool cond) const override;

    friend bool operator==(const DenoiserModel &a, const DenoiserModel &b) {
        return a.h_ == b.h_ && a.w_ == b.w_ && a.steps_ == b.steps_ && a.weights_ == b.weights_;
    }

private:
    std::size_t h_ = 0;
    std::size_t w_ = 0;
    std::size_t steps_ = 0;
    std::vector<double> weights_;
};

/// One (z_t, t, condition, eps) training draw.
struct DenoiserDraw {
    LatentTensor zt;
    std::size_t t = 0;
    bool cond = false;
    LatentTensor eps;
};

struct DenoiserObjective {
    double loss = 0.0;            ///< mean of ldm3d_loss over draws
    std::vector<double> gradient; ///< d loss / d W, empty unless requested
};

DenoiserObjective denoiser_objective(const DenoiserModel &model,
                                     std::span<const DenoiserDraw> draws, bool with_gradient);

struct DenoiserTrainOptions {
    double learning_rate = 1e-2;
    std::size_t steps = 2000;
    std::size_t batch = 16;
    std::uint64_t seed = 0;
    /// Probability of replacing a positive condition by the null flag.
    double uncond_prob = 0.1;
};

struct DenoiserTrainResult {
    DenoiserModel model;
    std::vector<double> loss_history; ///< batch loss at each step, before the update
};

/// Adam on random (sample, t ~ U{0..T-1}, eps ~ N(0, I)) draws. Without
/// labels every pass uses the null condition; with labels, positive samples
/// are conditioned except with probability uncond_prob. Weights start at 0.
DenoiserTrainResult train_toy_denoiser(std::span<const LatentTensor> latents,
                                       const NoiseSchedule &schedule,
                                       const DenoiserTrainOptions &options,
                                       std::span<const std::uint8_t> cond_labels = {});

/// Mean of the first and last `window` entries of a loss curve.
struct LossTrend {
    double initial = 0.0;
    double final = 0.0;
};
LossTrend loss_trend(std::span<const double> history, std::size_t window);

} // namespace ldm3d
