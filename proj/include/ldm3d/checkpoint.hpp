// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/diffusion.hpp"
#include "ldm3d/toy_autoencoder.hpp"
#include "ldm3d/toy_denoiser.hpp"

#include <filesystem>
#include <variant>

namespace ldm3d {

// .toymodel layout: u32 header length N, N bytes of UTF-8 JSON header, then
// the weight blob as little-endian float32. The header names the model kind,
// its shapes and (for denoisers) the noise schedule it was trained against.
// Weights are rounded to float32 on save.

struct DenoiserCheckpoint {
    DenoiserModel model;
    NoiseSchedule schedule;
};

using ToyCheckpoint = std::variant<LinearAutoencoder, DenoiserCheckpoint>;

void save_checkpoint(const std::filesystem::path &path, const LinearAutoencoder &model);
void save_checkpoint(const std::filesystem::path &path, const DenoiserModel &model,
                     const NoiseSchedule &schedule);

ToyCheckpoint load_checkpoint(const std::filesystem::path &path);
LinearAutoencoder load_autoencoder(const std::filesystem::path &path);
DenoiserCheckpoint load_denoiser(const std::filesystem::path &path);

} // namespace ldm3d
