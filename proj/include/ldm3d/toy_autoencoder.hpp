// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/depth_codec.hpp"
#include "ldm3d/diffusion.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ldm3d {

/// Linear KL autoencoder acting on non-overlapping 8x8 blocks of a 6-channel
/// RGBD tensor. Each block maps to one latent pixel of 4 channels, so an
/// H x W x 6 tensor encodes to (H/8) x (W/8) x 4.
///
/// All parameters live in one flat vector (layout below) so optimisers and
/// finite-difference checks can treat the model as a point in R^n.
class LinearAutoencoder {
public:
    static constexpr std::size_t kFactor = 8;
    static constexpr std::size_t kLatent = LatentTensor::channels;
    static constexpr std::size_t kBlock = kFactor * kFactor * RgbdTensor::channels;

    // Flat layout: enc_mu [kLatent x kBlock], enc_mu_bias [kLatent],
    // enc_logvar [kLatent x kBlock], enc_logvar_bias [kLatent],
    // dec [kBlock x kLatent], dec_bias [kBlock].
    static constexpr std::size_t kEncMu = 0;
    static constexpr std::size_t kEncMuBias = kEncMu + kLatent * kBlock;
    static constexpr std::size_t kEncLogvar = kEncMuBias + kLatent;
    static constexpr std::size_t kEncLogvarBias = kEncLogvar + kLatent * kBlock;
    static constexpr std::size_t kDec = kEncLogvarBias + kLatent;
    static constexpr std::size_t kDecBias = kDec + kBlock * kLatent;
    static constexpr std::size_t kParamCount = kDecBias + kBlock;

    LinearAutoencoder() : params_(kParamCount, 0.0) {}
    explicit LinearAutoencoder(std::vector<double> params);

    /// Small Gaussian weights, zero biases.
    static LinearAutoencoder random_init(std::uint64_t seed, double weight_std = 0.01);

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }

    struct Posterior {
        std::vector<double> mu;
        std::vector<double> logvar;
    };

    Posterior encode_block(std::span<const double> block) const;
    std::vector<double> decode_block(std::span<const double> latent) const;

    /// Posterior means of every block.
    LatentTensor encode(const RgbdTensor &tensor) const;
    /// Unclamped decoder output; split_rgbd clamps on quantisation.
    RgbdTensor decode(const LatentTensor &latent) const;

    friend bool operator==(const LinearAutoencoder &, const LinearAutoencoder &) = default;

private:
    std::vector<double> params_;
};

/// Cuts tensors into flattened 8x8x6 blocks (y, x, channel order). Tensor
/// sides must be multiples of 8.
std::vector<std::vector<double>> extract_blocks(std::span<const RgbdTensor> tensors);

struct AutoencoderObjective {
    double loss = 0.0;           ///< rec + reg_weight * kl, block mean
    double reconstruction = 0.0; ///< expected squared error per element
    double kl = 0.0;
    std::vector<double> gradient; ///< d loss / d params, empty unless requested
};

/// Reconstruction term is the expected per-element squared error of the
/// linear decoder under the Gaussian posterior, which has the closed form
/// |x - D mu - b|^2 / P + sum_j exp(logvar_j) |D_j|^2 / P. Adversarial and
/// discriminator terms are taken as zero.
AutoencoderObjective autoencoder_objective(const LinearAutoencoder &model,
                                           std::span<const std::vector<double>> blocks,
                                           double reg_weight, bool with_gradient);

/// Mean squared error of decode(encode_mean(x)) against x.
double reconstruction_mse(const LinearAutoencoder &model,
                          std::span<const std::vector<double>> blocks);

struct AutoencoderTrainOptions {
    double learning_rate = 1e-2;
    std::size_t steps = 500;
    double reg_weight = 1e-4;
    std::uint64_t seed = 0;
    /// Blocks per step; 0 uses every block (full-batch).
    std::size_t batch_blocks = 0;
};

struct AutoencoderTrainResult {
    LinearAutoencoder model;
    std::vector<double> loss_history; ///< objective before each step
    double final_loss = 0.0;          ///< full-data objective after training
};

/// Adam on the analytic gradient of autoencoder_objective.
AutoencoderTrainResult train_toy_autoencoder(std::span<const RgbdTensor> data,
                                             const AutoencoderTrainOptions &options);

} // namespace ldm3d
