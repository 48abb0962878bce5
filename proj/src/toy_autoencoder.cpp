// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/toy_autoencoder.hpp"

#include "ldm3d/adam.hpp"
#include "ldm3d/error.hpp"
#include "ldm3d/rng.hpp"

#include <array>
#include <cmath>
#include <string>

namespace ldm3d {

namespace {

using AE = LinearAutoencoder;

void check_block(std::span<const double> block) {
    if (block.size() != AE::kBlock) {
        throw Error(ErrorCode::ShapeMismatch, "block must hold 8*8*6 values");
    }
}

} // namespace

LinearAutoencoder::LinearAutoencoder(std::vector<double> params) : params_(std::move(params)) {
    if (params_.size() != kParamCount) {
        throw Error(ErrorCode::ShapeMismatch,
                    "autoencoder expects " + std::to_string(kParamCount) + " parameters");
    }
}

LinearAutoencoder LinearAutoencoder::random_init(std::uint64_t seed, double weight_std) {
    LinearAutoencoder model;
    Rng rng(seed);
    auto p = model.params();
    auto fill = [&](std::size_t begin, std::size_t count) {
        for (std::size_t i = begin; i < begin + count; ++i) {
            p[i] = weight_std * rng.normal();
        }
    };
    fill(kEncMu, kLatent * kBlock);
    fill(kEncLogvar, kLatent * kBlock);
    fill(kDec, kBlock * kLatent);
    return model;
}

LinearAutoencoder::Posterior LinearAutoencoder::encode_block(std::span<const double> block) const {
    check_block(block);
    Posterior post{std::vector<double>(kLatent), std::vector<double>(kLatent)};
    for (std::size_t j = 0; j < kLatent; ++j) {
        double mu = params_[kEncMuBias + j];
        double lv = params_[kEncLogvarBias + j];
        const double *wm = params_.data() + kEncMu + j * kBlock;
        const double *wl = params_.data() + kEncLogvar + j * kBlock;
        for (std::size_t i = 0; i < kBlock; ++i) {
            mu += wm[i] * block[i];
            lv += wl[i] * block[i];
        }
        post.mu[j] = mu;
        post.logvar[j] = lv;
    }
    return post;
}

std::vector<double> LinearAutoencoder::decode_block(std::span<const double> latent) const {
    if (latent.size() != kLatent) {
        throw Error(ErrorCode::ShapeMismatch, "latent pixel must hold 4 values");
    }
    std::vector<double> out(kBlock);
    for (std::size_t i = 0; i < kBlock; ++i) {
        const double *w = params_.data() + kDec + i * kLatent;
        double v = params_[kDecBias + i];
        for (std::size_t j = 0; j < kLatent; ++j) {
            v += w[j] * latent[j];
        }
        out[i] = v;
    }
    return out;
}

LatentTensor LinearAutoencoder::encode(const RgbdTensor &tensor) const {
    const std::array<RgbdTensor, 1> one{tensor};
    const auto blocks = extract_blocks(one);
    LatentTensor latent(tensor.height() / kFactor, tensor.width() / kFactor);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const Posterior post = encode_block(blocks[b]);
        for (std::size_t j = 0; j < kLatent; ++j) {
            latent[b * kLatent + j] = post.mu[j];
        }
    }
    return latent;
}

RgbdTensor LinearAutoencoder::decode(const LatentTensor &latent) const {
    RgbdTensor tensor(latent.width() * kFactor, latent.height() * kFactor);
    const auto lv = latent.values();
    for (std::size_t by = 0; by < latent.height(); ++by) {
        for (std::size_t bx = 0; bx < latent.width(); ++bx) {
            const std::size_t b = by * latent.width() + bx;
            const auto block = decode_block(lv.subspan(b * kLatent, kLatent));
            std::size_t k = 0;
            for (std::size_t y = 0; y < kFactor; ++y) {
                for (std::size_t x = 0; x < kFactor; ++x) {
                    for (std::size_t c = 0; c < RgbdTensor::channels; ++c) {
                        tensor.at(bx * kFactor + x, by * kFactor + y, c) =
                            static_cast<float>(block[k++]);
                    }
                }
            }
        }
    }
    return tensor;
}

std::vector<std::vector<double>> extract_blocks(std::span<const RgbdTensor> tensors) {
    std::vector<std::vector<double>> blocks;
    for (const RgbdTensor &t : tensors) {
        if (t.width() % AE::kFactor != 0 || t.height() % AE::kFactor != 0) {
            throw Error(ErrorCode::ShapeMismatch, "tensor sides must be multiples of 8, got " +
                                                      std::to_string(t.width()) + "x" +
                                                      std::to_string(t.height()));
        }
        for (std::size_t by = 0; by < t.height() / AE::kFactor; ++by) {
            for (std::size_t bx = 0; bx < t.width() / AE::kFactor; ++bx) {
                std::vector<double> block;
                block.reserve(AE::kBlock);
                for (std::size_t y = 0; y < AE::kFactor; ++y) {
                    for (std::size_t x = 0; x < AE::kFactor; ++x) {
                        for (std::size_t c = 0; c < RgbdTensor::channels; ++c) {
                            block.push_back(t.at(bx * AE::kFactor + x, by * AE::kFactor + y, c));
                        }
                    }
                }
                blocks.push_back(std::move(block));
            }
        }
    }
    return blocks;
}

AutoencoderObjective autoencoder_objective(const LinearAutoencoder &model,
                                           std::span<const std::vector<double>> blocks,
                                           double reg_weight, bool with_gradient) {
    if (blocks.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no blocks to evaluate");
    }
    constexpr std::size_t P = AE::kBlock;
    constexpr std::size_t L = AE::kLatent;
    const auto p = model.params();
    const double inv_p = 1.0 / static_cast<double>(P);

    AutoencoderObjective obj;
    if (with_gradient) {
        obj.gradient.assign(AE::kParamCount, 0.0);
    }

    // |D_j|^2 is shared by every block.
    std::array<double, L> col_sq{};
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            const double w = p[AE::kDec + i * L + j];
            col_sq[j] += w * w;
        }
    }

    std::vector<double> resid(P);
    for (const auto &x : blocks) {
        check_block(x);
        const auto post = model.encode_block(x);
        const auto recon = model.decode_block(post.mu);
        double sq = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
            resid[i] = x[i] - recon[i];
            sq += resid[i] * resid[i];
        }
        double spread = 0.0;
        std::array<double, L> var{};
        for (std::size_t j = 0; j < L; ++j) {
            var[j] = std::exp(post.logvar[j]);
            spread += var[j] * col_sq[j];
        }
        const double rec = (sq + spread) * inv_p;
        const double kl = kl_regularization(post.mu, post.logvar);
        obj.reconstruction += rec;
        obj.kl += kl;

        if (!with_gradient) {
            continue;
        }
        auto &g = obj.gradient;
        std::array<double, L> d_mu{};
        std::array<double, L> d_lv{};
        for (std::size_t j = 0; j < L; ++j) {
            d_mu[j] = reg_weight * post.mu[j];
            d_lv[j] = var[j] * col_sq[j] * inv_p + reg_weight * 0.5 * (var[j] - 1.0);
        }
        for (std::size_t i = 0; i < P; ++i) {
            const double d_out = -2.0 * inv_p * resid[i];
            g[AE::kDecBias + i] += d_out;
            for (std::size_t j = 0; j < L; ++j) {
                const double w = p[AE::kDec + i * L + j];
                g[AE::kDec + i * L + j] += d_out * post.mu[j] + 2.0 * inv_p * var[j] * w;
                d_mu[j] += w * d_out;
            }
        }
        for (std::size_t j = 0; j < L; ++j) {
            g[AE::kEncMuBias + j] += d_mu[j];
            g[AE::kEncLogvarBias + j] += d_lv[j];
            double *gm = g.data() + AE::kEncMu + j * P;
            double *gl = g.data() + AE::kEncLogvar + j * P;
            for (std::size_t i = 0; i < P; ++i) {
                gm[i] += d_mu[j] * x[i];
                gl[i] += d_lv[j] * x[i];
            }
        }
    }

    const double inv_n = 1.0 / static_cast<double>(blocks.size());
    obj.reconstruction *= inv_n;
    obj.kl *= inv_n;
    obj.loss = obj.reconstruction + reg_weight * obj.kl;
    for (double &v : obj.gradient) {
        v *= inv_n;
    }
    return obj;
}

double reconstruction_mse(const LinearAutoencoder &model,
                          std::span<const std::vector<double>> blocks) {
    if (blocks.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no blocks to evaluate");
    }
    double sum = 0.0;
    for (const auto &x : blocks) {
        const auto recon = model.decode_block(model.encode_block(x).mu);
        for (std::size_t i = 0; i < x.size(); ++i) {
            sum += (x[i] - recon[i]) * (x[i] - recon[i]);
        }
    }
    return sum / static_cast<double>(blocks.size() * AE::kBlock);
}

AutoencoderTrainResult train_toy_autoencoder(std::span<const RgbdTensor> data,
                                             const AutoencoderTrainOptions &options) {
    if (data.empty()) {
        throw Error(ErrorCode::EmptyDataset, "autoencoder training needs at least one tensor");
    }
    if (!(options.learning_rate >= 0.0) || !(options.reg_weight >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "learning rate and reg weight must be >= 0");
    }
    const auto blocks = extract_blocks(data);
    AutoencoderTrainResult result{LinearAutoencoder::random_init(options.seed), {}, 0.0};
    AdamState adam(AE::kParamCount, options.learning_rate);
    Rng rng(options.seed ^ 0x9E3779B97F4A7C15ULL);

    const bool full_batch = options.batch_blocks == 0 || options.batch_blocks >= blocks.size();
    std::vector<std::vector<double>> batch;
    result.loss_history.reserve(options.steps);
    for (std::size_t step = 0; step < options.steps; ++step) {
        std::span<const std::vector<double>> view = blocks;
        if (!full_batch) {
            batch.clear();
            for (std::size_t b = 0; b < options.batch_blocks; ++b) {
                batch.push_back(blocks[rng.below(blocks.size())]);
            }
            view = batch;
        }
        const auto obj = autoencoder_objective(result.model, view, options.reg_weight, true);
        result.loss_history.push_back(obj.loss);
        adam.step(result.model.params(), obj.gradient);
    }
    result.final_loss =
        autoencoder_objective(result.model, blocks, options.reg_weight, false).loss;
    return result;
}

} // namespace ldm3d
