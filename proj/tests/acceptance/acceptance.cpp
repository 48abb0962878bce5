// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "ldm3d/ddim.hpp"
#include "ldm3d/depth_codec.hpp"
#include "ldm3d/depth_eval.hpp"
#include "ldm3d/diffusion.hpp"
#include "ldm3d/gen_metrics.hpp"
#include "ldm3d/linalg.hpp"
#include "ldm3d/render.hpp"
#include "ldm3d/rng.hpp"
#include "ldm3d/toy_autoencoder.hpp"
#include "ldm3d/toy_denoiser.hpp"

#include "cli_harness.hpp"
#include "gradcheck.hpp"
#include "render_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace ldm3d;
using ldm3d::testing::gradient_relative_error;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Collects failed checks of one criterion plus a short measurement note.
class Outcome {
public:
    void check(bool ok, const std::string &what) {
        if (!ok && failures_.size() < 5) {
            failures_.push_back(what);
        }
        failed_ = failed_ || !ok;
    }
    void note(const std::string &text) { notes_ += (notes_.empty() ? "" : "; ") + text; }

    bool passed() const { return !failed_; }
    std::string summary() const {
        std::string s = notes_;
        for (const auto &f : failures_) {
            s += (s.empty() ? "" : "; ") + ("failed: " + f);
        }
        return s;
    }

private:
    bool failed_ = false;
    std::vector<std::string> failures_;
    std::string notes_;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

template <class Image>
bool same_values(const Image &a, const Image &b) {
    return a.width() == b.width() && a.height() == b.height() &&
           std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

// 1 -------------------------------------------------------------------------
Outcome codec() {
    Outcome o;
    const auto start = Clock::now();
    DepthMap16 every(256, 256);
    std::iota(every.values().begin(), every.values().end(), std::uint16_t{0});
    o.check(same_values(unpack_depth(pack_depth(every)), every), "16-bit exhaustive round trip");

    Rng rng(1);
    for (int pair = 0; pair < 100; ++pair) {
        const std::size_t w = 16 + rng.below(240), h = 8 + rng.below(120);
        const RgbImage rgb = ldm3d::testing::noise_rgb(rng, w, h);
        DepthMap16 depth(w, h);
        for (auto &v : depth.values()) {
            v = static_cast<std::uint16_t>(rng.below(65536));
        }
        const auto [rgb_back, depth_back] = split_rgbd(assemble_rgbd(rgb, pack_depth(depth)));
        o.check(same_values(rgb_back, rgb) && same_values(depth_back, depth),
                "assemble/split pair " + std::to_string(pair));
    }
    const double elapsed = seconds_since(start);
    o.check(elapsed < 5.0, "runtime " + fmt(elapsed) + " s");
    o.note(fmt(elapsed) + " s");
    return o;
}

// 2 -------------------------------------------------------------------------
Outcome alignment() {
    Outcome o;
    Rng rng(2);
    double worst_clean = 0.0, worst_noisy = 0.0;
    auto relation = [&](double noise_sigma, double tol, double &worst) {
        const std::size_t n = noise_sigma > 0 ? 10000 : 200;
        DisparityMap ref(n, 1), est(n, 1);
        const double a = rng.uniform(0.5, 2.0), b = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            ref.at(i, 0) = rng.uniform(0.1, 10.0);
            est.at(i, 0) = a * ref.at(i, 0) + b + noise_sigma * rng.normal();
        }
        std::vector<std::size_t> points(n);
        std::iota(points.begin(), points.end(), 0);
        const ScaleShift fit = fit_scale_shift(est, ref, points);
        const double e_scale = std::abs(fit.scale - 1 / a) / std::abs(1 / a);
        const double e_shift = std::abs(fit.shift + b / a) / std::max(std::abs(b / a), 1.0);
        worst = std::max({worst, e_scale, e_shift});
        return e_scale <= tol && e_shift <= tol;
    };
    for (int i = 0; i < 1000; ++i) {
        o.check(relation(0.0, 1e-9, worst_clean), "noiseless relation " + std::to_string(i));
        o.check(relation(0.01, 1e-2, worst_noisy), "noisy relation " + std::to_string(i));
    }
    const DisparityMap est(3, 1, std::vector<double>{1, 2, 3});
    const DisparityMap ref(3, 1, std::vector<double>{3, 5, 7});
    const std::vector<std::size_t> all{0, 1, 2};
    const ScaleShift hand = fit_scale_shift(est, ref, all);
    o.check(hand.scale == 2.0 && hand.shift == 1.0,
            "hand example gave (" + fmt(hand.scale) + ", " + fmt(hand.shift) + ")");
    o.note("worst noiseless rel " + fmt(worst_clean) + ", worst noisy rel " + fmt(worst_noisy));
    return o;
}

// 3 -------------------------------------------------------------------------
Outcome depth_metric_values() {
    Outcome o;
    Rng rng(3);
    MetricDepthMap a(64, 32);
    for (double &v : a.values()) {
        v = rng.uniform(0.5, 20.0);
    }
    const ValidityMask mask(64, 32, 1);
    const DepthMetrics same = depth_metrics(a, a, mask);
    o.check(same.abs_rel == 0.0 && same.rmse == 0.0, "identical maps");
    const DepthMetrics offset =
        depth_metrics(MetricDepthMap(64, 32, 3.0), MetricDepthMap(64, 32, 2.0), mask);
    o.check(offset.abs_rel == 0.5 && offset.rmse == 1.0,
            "offset case gave " + fmt(offset.abs_rel) + ", " + fmt(offset.rmse));
    o.note("identical AbsRel " + fmt(same.abs_rel) + " RMSE " + fmt(same.rmse) + ", offset AbsRel " +
           fmt(offset.abs_rel) + " RMSE " + fmt(offset.rmse));
    return o;
}

// 4 -------------------------------------------------------------------------
FeatureSet random_features(Rng &rng, std::size_t n, std::size_t d, double shift) {
    std::vector<double> rows(n * d);
    std::vector<double> mix(d * d);
    for (double &m : mix) {
        m = rng.normal();
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> g(d);
        for (double &v : g) {
            v = rng.normal();
        }
        for (std::size_t r = 0; r < d; ++r) {
            double acc = shift;
            for (std::size_t c = 0; c < d; ++c) {
                acc += mix[r * d + c] * g[c];
            }
            rows[i * d + r] = acc;
        }
    }
    return FeatureSet(n, d, std::move(rows));
}

SquareMatrix random_orthogonal(Rng &rng, std::size_t d) {
    // Gram-Schmidt on a Gaussian matrix.
    std::vector<std::vector<double>> q;
    while (q.size() < d) {
        std::vector<double> v(d);
        for (double &x : v) {
            x = rng.normal();
        }
        for (const auto &u : q) {
            const double p = std::inner_product(v.begin(), v.end(), u.begin(), 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                v[i] -= p * u[i];
            }
        }
        const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (n > 1e-6) {
            for (double &x : v) {
                x /= n;
            }
            q.push_back(v);
        }
    }
    SquareMatrix m(d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            m(r, c) = q[r][c];
        }
    }
    return m;
}

FeatureSet rotate(const FeatureSet &f, const SquareMatrix &q) {
    std::vector<double> rows(f.n() * f.d());
    for (std::size_t i = 0; i < f.n(); ++i) {
        for (std::size_t r = 0; r < f.d(); ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < f.d(); ++c) {
                acc += q(r, c) * f.row(i)[c];
            }
            rows[i * f.d() + r] = acc;
        }
    }
    return FeatureSet(f.n(), f.d(), std::move(rows));
}

double row_sum_norm(const SquareMatrix &m) {
    double worst = 0.0;
    for (std::size_t r = 0; r < m.size(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.size(); ++c) {
            s += std::abs(m(r, c));
        }
        worst = std::max(worst, s);
    }
    return worst;
}

Outcome fid_oracle() {
    Outcome o;
    Rng rng(4);
    const FeatureSet a = random_features(rng, 200, 6, 0.0);
    const double self = frechet_distance(gaussian_stats(a), gaussian_stats(a));
    o.check(self < 1e-8, "identical sets gave " + fmt(self));

    GaussianStats p{{0.0}, SquareMatrix(1, 1.0)};
    GaussianStats q{{1.0}, SquareMatrix(1, 4.0)};
    const double one_d = frechet_distance(p, q);
    o.check(std::abs(one_d - 2.0) < 1e-6, "1-D case gave " + fmt(one_d));

    double worst_sym = 0.0, worst_rot = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 1 + rng.below(8);
        const FeatureSet x = random_features(rng, 30 + rng.below(100), d, 0.0);
        const FeatureSet y = random_features(rng, 30 + rng.below(100), d, rng.uniform(-1, 1));
        const auto sx = gaussian_stats(x), sy = gaussian_stats(y);
        const double xy = frechet_distance(sx, sy);
        const double yx = frechet_distance(sy, sx);
        const SquareMatrix r = random_orthogonal(rng, d);
        const double rot = frechet_distance(gaussian_stats(rotate(x, r)), gaussian_stats(rotate(y, r)));
        worst_sym = std::max(worst_sym, std::abs(xy - yx));
        worst_rot = std::max(worst_rot, std::abs(xy - rot));
        o.check(std::abs(xy - yx) < 1e-6, "symmetry trial " + std::to_string(trial));
        o.check(std::abs(xy - rot) < 1e-6, "rotation trial " + std::to_string(trial));
    }

    double worst_sqrt = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + rng.below(12);
        const std::size_t rank = 1 + rng.below(d);
        std::vector<double> x(d * rank);
        for (double &v : x) {
            v = rng.normal();
        }
        SquareMatrix m(d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                for (std::size_t k = 0; k < rank; ++k) {
                    m(r, c) += x[r * rank + k] * x[c * rank + k];
                }
            }
        }
        const SquareMatrix s = sqrt_psd(m);
        const double residual = row_sum_norm(s * s - m);
        worst_sqrt = std::max(worst_sqrt, residual);
        o.check(residual < 1e-8, "sqrt trial " + std::to_string(trial) + " residual " + fmt(residual));
    }
    o.note("self " + fmt(self) + ", 1-D " + fmt(one_d) + ", worst asym " + fmt(worst_sym) +
           ", worst rotation " + fmt(worst_rot) + ", worst sqrt residual " + fmt(worst_sqrt));
    return o;
}

// 5 -------------------------------------------------------------------------
Outcome inception() {
    Outcome o;
    const std::size_t k = 10, n = 1000;
    const MeanStd uniform =
        inception_score(ProbabilitySet(n, k, std::vector<double>(n * k, 1.0 / k)));
    o.check(uniform.mean == 1.0, "uniform gave " + fmt(uniform.mean));
    std::vector<double> onehot(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        onehot[i * k + i % k] = 1.0;
    }
    const MeanStd balanced = inception_score(ProbabilitySet(n, k, std::move(onehot)));
    o.check(std::abs(balanced.mean - static_cast<double>(k)) < 1e-9,
            "one-hot gave " + fmt(balanced.mean));
    o.note("uniform " + fmt(uniform.mean) + ", one-hot k=10 " + fmt(balanced.mean));
    return o;
}

// 6 -------------------------------------------------------------------------
LatentTensor gaussian_latent(Rng &rng, std::size_t h, std::size_t w, double mean = 0.0) {
    LatentTensor z(h, w);
    for (double &v : z.values()) {
        v = mean + rng.normal();
    }
    return z;
}

class OracleDenoiser final : public NoisePredictor {
public:
    OracleDenoiser(LatentTensor z0, const NoiseSchedule &s) : z0_(std::move(z0)), s_(s) {}
    LatentTensor predict(const LatentTensor &zt, std::size_t t, bool) const override {
        LatentTensor eps(zt.height(), zt.width());
        const double a = std::sqrt(s_.alpha_bars[t]);
        const double b = std::sqrt(1.0 - s_.alpha_bars[t]);
        for (std::size_t i = 0; i < zt.size(); ++i) {
            eps[i] = (zt[i] - a * z0_[i]) / b;
        }
        return eps;
    }

private:
    LatentTensor z0_;
    const NoiseSchedule &s_;
};

class ConditionalOnly final : public NoisePredictor {
public:
    explicit ConditionalOnly(const NoisePredictor &inner) : inner_(inner) {}
    LatentTensor predict(const LatentTensor &zt, std::size_t t, bool) const override {
        return inner_.predict(zt, t, true);
    }

private:
    const NoisePredictor &inner_;
};

Outcome toy_diffusion() {
    Outcome o;
    Rng rng(6);

    // gradients: 25 autoencoder and 25 denoiser configurations
    double worst_grad = 0.0;
    using AE = LinearAutoencoder;
    for (int config = 0; config < 25; ++config) {
        auto model = AE::random_init(1000 + config, 0.05);
        for (std::size_t j = 0; j < 4; ++j) {
            model.params()[AE::kEncLogvarBias + j] = rng.uniform(-1, 1);
        }
        std::vector<std::vector<double>> blocks(1 + rng.below(3), std::vector<double>(AE::kBlock));
        for (auto &b : blocks) {
            for (auto &v : b) {
                v = rng.uniform();
            }
        }
        const double reg = rng.uniform(0, 0.5);
        const auto obj = autoencoder_objective(model, blocks, reg, true);
        const std::size_t starts[] = {AE::kEncMu,  AE::kEncMuBias, AE::kEncLogvar, AE::kEncLogvarBias,
                                      AE::kDec,    AE::kDecBias,   AE::kParamCount};
        std::vector<std::size_t> coords;
        for (std::size_t g = 0; g + 1 < std::size(starts); ++g) {
            for (int i = 0; i < 6; ++i) {
                coords.push_back(starts[g] + rng.below(starts[g + 1] - starts[g]));
            }
        }
        const double err = gradient_relative_error(
            model.params(), obj.gradient, coords,
            [&] { return autoencoder_objective(model, blocks, reg, false).loss; });
        worst_grad = std::max(worst_grad, err);
        o.check(err < 1e-4, "autoencoder gradient config " + std::to_string(config));
    }
    const auto small_schedule = make_noise_schedule(50, 1e-3, 0.05);
    for (int config = 0; config < 25; ++config) {
        const std::size_t h = 1 + rng.below(2), w = 1 + rng.below(3);
        DenoiserModel model(h, w, small_schedule.steps);
        for (double &v : model.weights()) {
            v = 0.3 * rng.normal();
        }
        std::vector<DenoiserDraw> draws(1 + rng.below(4));
        for (auto &d : draws) {
            d.t = rng.below(small_schedule.steps);
            d.cond = rng.uniform() < 0.5;
            d.eps = gaussian_latent(rng, h, w);
            d.zt = forward_diffuse(gaussian_latent(rng, h, w), d.t, d.eps, small_schedule);
        }
        const auto obj = denoiser_objective(model, draws, true);
        std::vector<std::size_t> coords(model.weights().size());
        std::iota(coords.begin(), coords.end(), 0);
        const double err = gradient_relative_error(
            model.weights(), obj.gradient, coords,
            [&] { return denoiser_objective(model, draws, false).loss; });
        worst_grad = std::max(worst_grad, err);
        o.check(err < 1e-4, "denoiser gradient config " + std::to_string(config));
    }

    // forward-process variance, 10^4 draws per timestep
    const auto schedule = make_noise_schedule();
    const std::size_t draws = 10000;
    double worst_sigmas = 0.0;
    for (std::size_t t : {0u, 100u, 500u, 999u}) {
        const LatentTensor z0(1, 1, std::vector<double>{0.7, 0.7, 0.7, 0.7});
        double sum = 0, sq = 0;
        for (std::size_t n = 0; n < draws; ++n) {
            const auto zt = forward_diffuse(z0, t, gaussian_latent(rng, 1, 1), schedule);
            sum += zt[0];
            sq += zt[0] * zt[0];
        }
        const double var_true = 1.0 - schedule.alpha_bars[t];
        const double var_hat = sq / draws - (sum / draws) * (sum / draws);
        const double sigmas = std::abs(var_hat - var_true) / (var_true * std::sqrt(2.0 / (draws - 1)));
        worst_sigmas = std::max(worst_sigmas, sigmas);
        o.check(sigmas < 3.0, "forward variance at t=" + std::to_string(t));
    }

    // guidance identity at s = 1
    DenoiserModel model(2, 2, schedule.steps);
    for (double &v : model.weights()) {
        v = 0.1 * rng.normal();
    }
    const ConditionalOnly cond_only(model);
    for (int trial = 0; trial < 5; ++trial) {
        const auto zT = gaussian_latent(rng, 2, 2);
        const GuidanceConfig cfg{1.0, 5 + rng.below(60), 0.0};
        o.check(ddim_sample(model, schedule, cfg, zT, true) ==
                    ddim_sample(cond_only, schedule, cfg, zT, true),
                "s=1 bitwise trial " + std::to_string(trial));
    }

    // oracle denoiser recovers z0
    double worst_z0 = 0.0;
    for (std::size_t steps : {1u, 10u, 50u, 250u, 1000u}) {
        const auto z0 = gaussian_latent(rng, 2, 3);
        const OracleDenoiser oracle(z0, schedule);
        const auto zT = forward_diffuse(z0, schedule.steps - 1, gaussian_latent(rng, 2, 3), schedule);
        const auto out = ddim_sample(oracle, schedule, {1.0, steps, 0.0}, zT, true);
        for (std::size_t i = 0; i < out.size(); ++i) {
            worst_z0 = std::max(worst_z0, std::abs(out[i] - z0[i]));
        }
    }
    o.check(worst_z0 < 1e-6, "oracle z0 error " + fmt(worst_z0));

    // training on synthetic latents
    std::vector<LatentTensor> latents;
    for (int i = 0; i < 64; ++i) {
        latents.push_back(gaussian_latent(rng, 2, 2, 1.5));
    }
    DenoiserTrainOptions opt;
    opt.steps = 800;
    opt.seed = 5;
    const auto start = Clock::now();
    const auto trained = train_toy_denoiser(latents, schedule, opt);
    const double elapsed = seconds_since(start);
    const auto trend = loss_trend(trained.loss_history, 100);
    const double drop = 1.0 - trend.final / trend.initial;
    o.check(drop >= 0.10, "loss drop " + fmt(100 * drop) + "%");
    o.check(elapsed < 60.0, "training took " + fmt(elapsed) + " s");

    o.note("worst grad rel " + fmt(worst_grad) + ", worst variance dev " + fmt(worst_sigmas) +
           " sigma, z0 err " + fmt(worst_z0) + ", loss drop " + fmt(100 * drop) + "% in " +
           fmt(elapsed) + " s");
    return o;
}

// 7 -------------------------------------------------------------------------
DepthField smooth_depth(Rng &rng, std::size_t w, std::size_t h) {
    const double a = rng.uniform(0, 6.28), b = rng.uniform(0, 6.28);
    DepthField f(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double u = (x + 0.5) / static_cast<double>(w);
            const double v = (y + 0.5) / static_cast<double>(h);
            f.at(x, y) = 0.5 + 0.45 * std::sin(2 * std::numbers::pi * 3 * u + a) * std::cos(6 * v + b);
        }
    }
    return f;
}

Outcome render_identity() {
    Outcome o;
    Rng rng(7);
    const RgbImage tex = ldm3d::testing::smooth_panorama(1024, 512);
    const EquirectImage pano(tex);
    const SphereMesh flat = build_sphere_mesh(256, 512, 1.0);
    const DepthField depth = smooth_depth(rng, 1024, 512);

    const std::vector<std::pair<double, double>> poses{
        {0.0, 0.0}, {1.9, 0.3}, {-2.6, -0.6}, {3.14159, 1.2}};
    double worst_oracle = 0.0, worst_k = 0.0, worst_frame = 0.0;
    for (auto [yaw, pitch] : poses) {
        Viewpoint vp;
        vp.yaw = yaw;
        vp.pitch = pitch;
        vp.width = 512;
        vp.height = 512;
        const auto start = Clock::now();
        const RgbImage base = render_view(flat, pano, vp);
        worst_frame = std::max(worst_frame, seconds_since(start));
        const auto err = ldm3d::testing::origin_oracle_error(base, tex, vp);
        worst_oracle = std::max(worst_oracle, err.mean);
        o.check(err.mean < 2.0, "oracle mean " + fmt(err.mean) + "/255");
        for (double k : {0.1, 0.5, 0.9}) {
            const RgbImage displaced = render_view(displace_vertices(flat, depth, k), pano, vp);
            const double vs_flat = ldm3d::testing::image_difference(displaced, base).mean;
            const double vs_oracle = ldm3d::testing::origin_oracle_error(displaced, tex, vp).mean;
            worst_k = std::max(worst_k, vs_flat);
            worst_oracle = std::max(worst_oracle, vs_oracle);
            o.check(vs_flat < 2.0, "k=" + fmt(k) + " changed the frame by " + fmt(vs_flat) + "/255");
            o.check(vs_oracle < 2.0, "k=" + fmt(k) + " oracle mean " + fmt(vs_oracle) + "/255");
        }
    }
    o.check(worst_frame < 1.0, "512x512 frame took " + fmt(worst_frame) + " s");
    o.note("worst oracle mean " + fmt(worst_oracle) + "/255, worst k change " + fmt(worst_k) +
           "/255, slowest frame " + fmt(worst_frame) + " s");
    return o;
}

// 8 -------------------------------------------------------------------------
Outcome displacement_anchors() {
    Outcome o;
    const SphereMesh mesh = build_sphere_mesh(32, 64, 1.3);
    for (double k : {0.0, 0.25, 0.5, 1.0, 4.0}) {
        o.check(displace_vertices(mesh, DepthField(16, 8, 0.5), k).radii() == mesh.radii(),
                "d=0.5 identity at k=" + fmt(k));
    }
    for (double k : {0.1, 0.5, 0.9}) {
        const auto nearer = displace_vertices(mesh, DepthField(16, 8, 1.0), k).radii();
        const auto farther = displace_vertices(mesh, DepthField(16, 8, 0.0), k).radii();
        for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
            o.check(nearer[i] < mesh.radii()[i], "d=1 did not pull vertex in");
            o.check(farther[i] > mesh.radii()[i], "d=0 did not push vertex out");
        }
        std::vector<double> previous(mesh.vertex_count(), INFINITY);
        for (int step = 0; step <= 40; ++step) {
            const auto r = displace_vertices(mesh, DepthField(4, 2, step / 40.0), k).radii();
            for (std::size_t i = 0; i < r.size(); ++i) {
                o.check(r[i] < previous[i], "radius not decreasing in d at k=" + fmt(k));
            }
            previous = r;
        }
    }
    o.note("identity, direction and monotonicity checked on " +
           std::to_string(mesh.vertex_count()) + " vertices for k in {0.1, 0.5, 0.9}");
    return o;
}

// 9 -------------------------------------------------------------------------
Outcome stereo() {
    Outcome o;
    const ldm3d::testing::TwoPlaneScene scene;
    Viewpoint vp;
    vp.width = 256;
    vp.height = 128;
    const auto [l0, r0] = render_stereo_pair(scene.mesh, scene.pano, vp, 0.0);
    o.check(same_values(l0, r0), "ipd=0 frames differ");
    const auto [left, right] = render_stereo_pair(scene.mesh, scene.pano, vp, 0.06);
    const auto [near_d, far_d] = ldm3d::testing::two_plane_disparities(left, right);
    o.check(near_d > far_d, "near disparity " + fmt(near_d) + " <= far " + fmt(far_d));
    o.note("near disparity " + fmt(near_d) + " px, far " + fmt(far_d) + " px");
    return o;
}

// 10 ------------------------------------------------------------------------
Outcome cli_determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "ldm3d_acceptance_cli";
    fs::remove_all(root);
    ldm3d::testing::write_corpus(root / "corpus");
    std::string failure;
    const auto first = ldm3d::testing::run_seeded_pipeline(root / "corpus", root / "run1", failure);
    o.check(failure.empty(), failure);
    const auto second = ldm3d::testing::run_seeded_pipeline(root / "corpus", root / "run2", failure);
    o.check(failure.empty(), failure);
    o.check(!first.empty() && first.size() == second.size(), "artifact sets differ");
    for (const auto &[name, bytes] : first) {
        const auto it = second.find(name);
        o.check(it != second.end() && it->second == bytes, name + " differs");
    }
    o.note(std::to_string(first.size()) +
           " artifacts compared across align, toy-train-ae, toy-train-denoiser, toy-sample, sweep");
    fs::remove_all(root);
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"codec exhaustiveness", codec},
        {"alignment recovery", alignment},
        {"depth metrics", depth_metric_values},
        {"FID oracle", fid_oracle},
        {"inception score", inception},
        {"toy diffusion", toy_diffusion},
        {"render identity", render_identity},
        {"displacement anchors", displacement_anchors},
        {"stereo", stereo},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception &e) {
            outcome.check(false, std::string("exception: ") + e.what());
        }
        failed += !outcome.passed();
        std::printf("%s %2zu %s: %s\n", outcome.passed() ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    outcome.summary().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
