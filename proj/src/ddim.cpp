// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/ddim.hpp"

#include "ldm3d/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ldm3d {

std::vector<std::size_t> ddim_timesteps(std::size_t schedule_steps, std::size_t ddim_steps) {
    if (ddim_steps == 0 || ddim_steps > schedule_steps) {
        throw Error(ErrorCode::ConfigInvalid, "ddim steps must be in [1, " +
                                                  std::to_string(schedule_steps) + "], got " +
                                                  std::to_string(ddim_steps));
    }
    std::vector<std::size_t> taus(ddim_steps);
    for (std::size_t i = 0; i < ddim_steps; ++i) {
        // Integer form of round((i+1) T / S) - 1.
        taus[i] = ((i + 1) * schedule_steps * 2 + ddim_steps) / (2 * ddim_steps) - 1;
    }
    return taus;
}

LatentTensor guided_prediction(const NoisePredictor &model, const LatentTensor &zt, std::size_t t,
                               bool cond, double scale) {
    if (!cond || scale == 0.0) {
        return model.predict(zt, t, false);
    }
    if (scale == 1.0) {
        return model.predict(zt, t, true);
    }
    LatentTensor uncond = model.predict(zt, t, false);
    const LatentTensor conditioned = model.predict(zt, t, true);
    for (std::size_t i = 0; i < uncond.size(); ++i) {
        uncond[i] += scale * (conditioned[i] - uncond[i]);
    }
    return uncond;
}

LatentTensor ddim_sample(const NoisePredictor &model, const NoiseSchedule &schedule,
                         const GuidanceConfig &config, const LatentTensor &z_T, bool cond) {
    if (config.eta != 0.0) {
        throw Error(ErrorCode::ConfigInvalid, "only eta = 0 (deterministic DDIM) is supported");
    }
    if (!(config.scale >= 0.0) || !std::isfinite(config.scale)) {
        throw Error(ErrorCode::ConfigInvalid, "guidance scale must be finite and >= 0");
    }
    const auto taus = ddim_timesteps(schedule.steps, config.ddim_steps);
    LatentTensor z = z_T;
    for (std::size_t k = taus.size(); k-- > 0;) {
        const std::size_t t = taus[k];
        const double abar = schedule.alpha_bars[t];
        const double abar_prev = k > 0 ? schedule.alpha_bars[taus[k - 1]] : 1.0;
        const LatentTensor eps = guided_prediction(model, z, t, cond, config.scale);
        const double sqrt_abar = std::sqrt(abar);
        const double sqrt_one_minus = std::sqrt(1.0 - abar);
        const double sqrt_prev = std::sqrt(abar_prev);
        const double sqrt_prev_one_minus = std::sqrt(1.0 - abar_prev);
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double x0 = (z[i] - sqrt_one_minus * eps[i]) / sqrt_abar;
            z[i] = sqrt_prev * x0 + sqrt_prev_one_minus * eps[i];
        }
    }
    return z;
}

std::vector<SweepRow> sweep_harness(std::span<const double> scales,
                                    std::span<const std::size_t> steps_list,
                                    const SweepEval &eval) {
    if (scales.empty() || steps_list.empty()) {
        throw Error(ErrorCode::InvalidArgument, "sweep needs at least one scale and one step count");
    }
    std::vector<double> s(scales.begin(), scales.end());
    std::vector<std::size_t> n(steps_list.begin(), steps_list.end());
    std::sort(s.begin(), s.end());
    std::sort(n.begin(), n.end());
    std::vector<SweepRow> rows;
    rows.reserve(s.size() * n.size());
    for (double scale : s) {
        for (std::size_t steps : n) {
            rows.push_back({scale, steps, eval(GuidanceConfig{scale, steps, 0.0})});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream &out, std::span<const SweepRow> rows) {
    const auto old_precision = out.precision(10);
    out << "scale,steps,score\n";
    for (const auto &row : rows) {
        out << row.scale << ',' << row.steps << ',' << row.score << '\n';
    }
    out.precision(old_precision);
}

} // namespace ldm3d
