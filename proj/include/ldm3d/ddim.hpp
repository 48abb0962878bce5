// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ldm3d/diffusion.hpp"
#include "ldm3d/toy_denoiser.hpp"

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

namespace ldm3d {

struct GuidanceConfig {
    double scale = 1.0;
    std::size_t ddim_steps = 50;
    /// Only the deterministic sampler is implemented; anything but 0 is rejected.
    double eta = 0.0;
};

/// Evenly spaced ascending timesteps ending at T-1: tau_i = round((i+1) T / S) - 1.
std::vector<std::size_t> ddim_timesteps(std::size_t schedule_steps, std::size_t ddim_steps);

/// eps_u + s (eps_c - eps_u). s == 1 returns the conditional prediction and
/// s == 0 the unconditional one without re-association, so both endpoints
/// are exact. With cond == false the unconditional prediction is returned.
LatentTensor guided_prediction(const NoisePredictor &model, const LatentTensor &zt, std::size_t t,
                               bool cond, double scale);

/// Deterministic DDIM from z_T down to the clean latent.
LatentTensor ddim_sample(const NoisePredictor &model, const NoiseSchedule &schedule,
                         const GuidanceConfig &config, const LatentTensor &z_T, bool cond);

struct SweepRow {
    double scale = 0.0;
    std::size_t steps = 0;
    double score = 0.0;
};

using SweepEval = std::function<double(const GuidanceConfig &)>;

/// One row per (scale, steps) pair, ordered by scale then steps.
std::vector<SweepRow> sweep_harness(std::span<const double> scales,
                                    std::span<const std::size_t> steps_list,
                                    const SweepEval &eval);

/// CSV with header "scale,steps,score".
void write_sweep_csv(std::ostream &out, std::span<const SweepRow> rows);

} // namespace ldm3d
