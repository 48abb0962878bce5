// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/cli.hpp"

#include "ldm3d/checkpoint.hpp"
#include "ldm3d/ddim.hpp"
#include "ldm3d/depth_codec.hpp"
#include "ldm3d/depth_eval.hpp"
#include "ldm3d/error.hpp"
#include "ldm3d/gen_metrics.hpp"
#include "ldm3d/image_io.hpp"
#include "ldm3d/render.hpp"
#include "ldm3d/rng.hpp"
#include "ldm3d/scene_bundle.hpp"
#include "ldm3d/sphere_mesh.hpp"
#include "ldm3d/static_server.hpp"
#include "ldm3d/toy_autoencoder.hpp"
#include "ldm3d/toy_denoiser.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace ldm3d::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    file << text;
    if (!file) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

void write_json(const fs::path &path, const ordered_json &doc) {
    write_text(path, doc.dump(2) + "\n");
}

bool has_extension(const fs::path &path, std::string_view ext) {
    return path.extension().string() == ext;
}

// .rgbd tensors carry their depth in channels 3..5; anything else is a 16-bit PNG.
DepthMap16 load_depth(const fs::path &path) {
    if (has_extension(path, ".rgbd")) {
        return split_rgbd(read_rgbd(path)).second;
    }
    return read_depth_png(path);
}

std::vector<fs::path> files_in(const fs::path &dir, std::string_view ext) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && (ext.empty() || has_extension(entry.path(), ext))) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<fs::path> expand_rgbd_inputs(const std::vector<fs::path> &inputs) {
    std::vector<fs::path> files;
    for (const auto &in : inputs) {
        if (fs::is_directory(in)) {
            auto found = files_in(in, ".rgbd");
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(in);
        }
    }
    if (files.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no .rgbd inputs found");
    }
    return files;
}

struct LatentShape {
    std::size_t height = 0;
    std::size_t width = 0;
};

LatentShape parse_latent_shape(const std::string &text, std::size_t dim) {
    if (text.empty()) {
        if (dim % LatentTensor::channels != 0) {
            throw Error(ErrorCode::ShapeMismatch,
                        "feature width " + std::to_string(dim) + " is not a multiple of 4");
        }
        return {1, dim / LatentTensor::channels};
    }
    const auto x = text.find('x');
    LatentShape shape;
    try {
        if (x == std::string::npos) {
            throw std::invalid_argument(text);
        }
        shape.height = std::stoul(text.substr(0, x));
        shape.width = std::stoul(text.substr(x + 1));
    } catch (const std::exception &) {
        throw Error(ErrorCode::InvalidArgument, "latent shape must look like HxW, got " + text);
    }
    if (shape.height * shape.width * LatentTensor::channels != dim) {
        throw Error(ErrorCode::ShapeMismatch, "latent shape " + text + " does not hold " +
                                                  std::to_string(dim) + " values");
    }
    return shape;
}

std::vector<LatentTensor> latents_from(const FeatureSet &features, const LatentShape &shape) {
    std::vector<LatentTensor> out;
    out.reserve(features.n());
    for (std::size_t i = 0; i < features.n(); ++i) {
        const auto row = features.row(i);
        out.emplace_back(shape.height, shape.width, std::vector<double>(row.begin(), row.end()));
    }
    return out;
}

FeatureSet features_from(std::span<const LatentTensor> latents) {
    if (latents.empty()) {
        throw Error(ErrorCode::EmptySet, "no latents");
    }
    const std::size_t d = latents.front().size();
    std::vector<double> rows;
    rows.reserve(latents.size() * d);
    for (const auto &z : latents) {
        rows.insert(rows.end(), z.values().begin(), z.values().end());
    }
    return FeatureSet(latents.size(), d, std::move(rows));
}

std::vector<std::uint8_t> read_labels(const fs::path &path, std::size_t expected) {
    std::ifstream file(path);
    if (!file) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::vector<std::uint8_t> labels;
    long value = 0;
    while (file >> value) {
        if (value != 0 && value != 1) {
            throw Error(ErrorCode::FormatError, "labels must be 0 or 1");
        }
        labels.push_back(static_cast<std::uint8_t>(value));
    }
    if (!file.eof()) {
        throw Error(ErrorCode::FormatError, "unparseable label file " + path.string());
    }
    if (labels.size() != expected) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(expected) + " labels, got " +
                        std::to_string(labels.size()));
    }
    return labels;
}

void write_loss_csv(const fs::path &path, std::span<const double> history) {
    std::ostringstream csv;
    csv << "step,loss\n" << std::setprecision(10);
    for (std::size_t i = 0; i < history.size(); ++i) {
        csv << i << ',' << history[i] << '\n';
    }
    write_text(path, csv.str());
}

std::vector<LatentTensor> draw_samples(const NoisePredictor &model,
                                       const DenoiserCheckpoint &ckpt,
                                       const GuidanceConfig &config, std::size_t count,
                                       std::uint64_t seed, bool cond) {
    Rng rng(seed);
    std::vector<LatentTensor> samples;
    samples.reserve(count);
    const std::size_t h = ckpt.model.latent_height();
    const std::size_t w = ckpt.model.latent_width();
    for (std::size_t i = 0; i < count; ++i) {
        LatentTensor z(h, w);
        for (auto &v : z.values()) {
            v = rng.normal();
        }
        samples.push_back(ddim_sample(model, ckpt.schedule, config, z, cond));
    }
    return samples;
}

// Options shared by every subcommand that builds and views the displaced sphere.
struct SceneOptions {
    fs::path texture;
    fs::path depth;
    fs::path rgbd;
    std::size_t rows = 256;
    std::size_t cols = 512;
    double radius = 1.0;
    double strength = 0.5;
};

void add_scene_options(CLI::App *cmd, SceneOptions &o) {
    auto *tex = cmd->add_option("--texture", o.texture, "Equirectangular RGB PNG")
                    ->check(CLI::ExistingFile);
    auto *dep = cmd->add_option("--depth", o.depth, "16-bit depth PNG, 0 far .. 65535 near")
                    ->check(CLI::ExistingFile);
    auto *rgbd = cmd->add_option("--rgbd", o.rgbd, "6-channel .rgbd tensor (replaces both)")
                     ->check(CLI::ExistingFile);
    rgbd->excludes(tex)->excludes(dep);
    cmd->add_option("--rows", o.rows, "Latitude rings")->check(CLI::Range(2, 1 << 14));
    cmd->add_option("--cols", o.cols, "Longitude segments")->check(CLI::Range(3, 1 << 15));
    cmd->add_option("--radius", o.radius, "Base sphere radius")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--strength", o.strength, "Displacement strength k")
        ->check(CLI::NonNegativeNumber);
}

struct LoadedScene {
    SphereMesh mesh;
    std::optional<EquirectImage> texture;
    std::optional<DepthMap16> depth;
};

LoadedScene load_scene(const SceneOptions &o, bool need_texture) {
    std::optional<RgbImage> rgb;
    std::optional<DepthMap16> depth;
    if (!o.rgbd.empty()) {
        auto [image, d] = split_rgbd(read_rgbd(o.rgbd));
        rgb = std::move(image);
        depth = std::move(d);
    } else {
        if (!o.texture.empty()) {
            rgb = read_rgb_png(o.texture);
        }
        if (!o.depth.empty()) {
            depth = read_depth_png(o.depth);
        }
    }
    if (need_texture && !rgb) {
        throw Error(ErrorCode::MissingAsset, "a texture is required (--texture or --rgbd)");
    }
    SphereMesh mesh = build_sphere_mesh(o.rows, o.cols, o.radius);
    if (depth) {
        mesh = displace_vertices(mesh, *depth, o.strength);
    }
    LoadedScene scene{std::move(mesh), std::nullopt, std::move(depth)};
    if (rgb) {
        scene.texture.emplace(std::move(*rgb));
    }
    return scene;
}

struct ViewOptions {
    std::vector<double> pos{0.0, 0.0, 0.0};
    double yaw = 0.0;
    double pitch = 0.0;
    double fov = 90.0;
    std::size_t width = 512;
    std::size_t height = 512;
    std::size_t threads = 0;
};

void add_view_options(CLI::App *cmd, ViewOptions &o) {
    cmd->add_option("--pos", o.pos, "Camera position x y z")->expected(3);
    cmd->add_option("--yaw", o.yaw, "Yaw in degrees, 0 looks along +X, 90 along +Z");
    cmd->add_option("--pitch", o.pitch, "Pitch in degrees, positive looks up")
        ->check(CLI::Range(-89.9, 89.9));
    cmd->add_option("--fov", o.fov, "Vertical field of view in degrees")
        ->check(CLI::Range(1.0, 179.0));
    cmd->add_option("--width", o.width, "Frame width in pixels")->check(CLI::Range(1, 1 << 14));
    cmd->add_option("--height", o.height, "Frame height in pixels")
        ->check(CLI::Range(1, 1 << 14));
    cmd->add_option("--threads", o.threads, "Raster threads, 0 picks the hardware count");
}

Viewpoint make_viewpoint(const ViewOptions &o) {
    Viewpoint vp;
    vp.position = Vec3{o.pos[0], o.pos[1], o.pos[2]};
    vp.yaw = o.yaw * kDegToRad;
    vp.pitch = o.pitch * kDegToRad;
    vp.fov_y = o.fov * kDegToRad;
    vp.width = o.width;
    vp.height = o.height;
    return vp;
}

RasterOptions raster_options(const ViewOptions &o) {
    RasterOptions options;
    options.threads = o.threads;
    return options;
}

ordered_json pair_json(const PairEvaluation &r) {
    ordered_json j;
    j["scale"] = r.fit.scale;
    j["shift"] = r.fit.shift;
    j["abs_rel"] = r.metrics.abs_rel;
    j["rmse"] = r.metrics.rmse;
    j["n_valid"] = r.metrics.n_valid;
    return j;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Toolkit for RGB plus depth panoramas: codec, depth evaluation, generative "
                 "metrics, toy latent diffusion and immersive rendering",
                 "ldm3d"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough(false);

    std::function<void()> action;

    // pack / unpack
    fs::path pack_in, pack_out;
    auto *pack = app.add_subcommand("pack", "Split a 16-bit depth PNG into a 3x8-bit PNG");
    pack->add_option("--in", pack_in, "16-bit depth PNG")->required()->check(CLI::ExistingFile);
    pack->add_option("--out", pack_out, "Packed RGB PNG")->required();
    pack->callback([&] {
        action = [&] { write_packed_png(pack_out, pack_depth(read_depth_png(pack_in))); };
    });

    fs::path unpack_in, unpack_out;
    auto *unpack = app.add_subcommand("unpack", "Rebuild a 16-bit depth PNG from a packed PNG");
    unpack->add_option("--in", unpack_in, "Packed RGB PNG")->required()->check(CLI::ExistingFile);
    unpack->add_option("--out", unpack_out, "16-bit depth PNG")->required();
    unpack->callback([&] {
        action = [&] {
            UnpackReport report;
            write_depth_png(unpack_out, unpack_depth(read_packed_png(unpack_in), &report));
            if (report.truncated()) {
                err << "warning: " << report.truncated_pixels
                    << " pixels had a non-zero high channel, ignored\n";
            }
        };
    });

    // assemble / split
    fs::path asm_rgb, asm_packed, asm_depth, asm_out;
    auto *assemble = app.add_subcommand("assemble", "Build a 6-channel .rgbd tensor");
    assemble->add_option("--rgb", asm_rgb, "RGB PNG")->required()->check(CLI::ExistingFile);
    auto *asm_p = assemble->add_option("--packed", asm_packed, "Packed depth PNG")
                      ->check(CLI::ExistingFile);
    auto *asm_d = assemble->add_option("--depth", asm_depth, "16-bit depth PNG, packed on the fly")
                      ->check(CLI::ExistingFile);
    asm_p->excludes(asm_d);
    assemble->add_option("--out", asm_out, "Output .rgbd file")->required();
    assemble->callback([&] {
        if (asm_packed.empty() && asm_depth.empty()) {
            throw CLI::RequiredError("--packed or --depth");
        }
        action = [&] {
            const PackedDepthImage packed = asm_packed.empty()
                                                ? pack_depth(read_depth_png(asm_depth))
                                                : read_packed_png(asm_packed);
            write_rgbd(asm_out, assemble_rgbd(read_rgb_png(asm_rgb), packed));
        };
    });

    fs::path split_in, split_rgb, split_depth;
    auto *split = app.add_subcommand("split", "Split a .rgbd tensor into RGB and depth PNGs");
    split->add_option("--in", split_in, ".rgbd file")->required()->check(CLI::ExistingFile);
    split->add_option("--rgb-out", split_rgb, "RGB PNG")->required();
    split->add_option("--depth-out", split_depth, "16-bit depth PNG")->required();
    split->callback([&] {
        action = [&] {
            UnpackReport report;
            auto [rgb, depth] = split_rgbd(read_rgbd(split_in), &report);
            write_rgb_png(split_rgb, rgb);
            write_depth_png(split_depth, depth);
            if (report.truncated()) {
                err << "warning: " << report.truncated_pixels
                    << " pixels had a non-zero high channel, ignored\n";
            }
        };
    });

    // align
    fs::path align_est, align_ref, align_out, align_csv;
    std::uint64_t align_seed = 0;
    std::size_t align_points = kDefaultFitPoints;
    double align_eps = kDefaultDisparityFloor;
    auto *align = app.add_subcommand(
        "align", "Fit scale and shift in disparity space, invert, report AbsRel and RMSE");
    align->add_option("--est", align_est, "Estimated disparity: PNG, .rgbd or directory")
        ->required()
        ->check(CLI::ExistingPath);
    align->add_option("--ref", align_ref, "Reference disparity: PNG, .rgbd or directory")
        ->required()
        ->check(CLI::ExistingPath);
    align->add_option("--seed", align_seed, "Seed for fit-point sampling")->required();
    align->add_option("--points", align_points, "Fit points per image")
        ->check(CLI::PositiveNumber);
    align->add_option("--eps", align_eps, "Disparity floor before inversion")
        ->check(CLI::PositiveNumber);
    align->add_option("--out", align_out, "Output JSON")->required();
    align->add_option("--csv", align_csv, "Optional per-image CSV");
    align->callback([&] {
        action = [&] {
            const EvalOptions options{align_points, align_seed, align_eps};
            std::vector<NamedEvaluation> results;
            const bool dir_mode = fs::is_directory(align_est);
            if (dir_mode != fs::is_directory(align_ref)) {
                throw Error(ErrorCode::InvalidArgument,
                            "--est and --ref must both be files or both be directories");
            }
            if (dir_mode) {
                for (const auto &est : files_in(align_est, "")) {
                    const fs::path ref = align_ref / est.filename();
                    if (!fs::exists(ref)) {
                        err << "warning: no reference for " << est.filename().string()
                            << ", skipped\n";
                        continue;
                    }
                    results.push_back(
                        {est.filename().string(),
                         evaluate_pair(disparity_from_depth16(load_depth(est)),
                                       disparity_from_depth16(load_depth(ref)), options)});
                }
            } else {
                results.push_back(
                    {align_est.filename().string(),
                     evaluate_pair(disparity_from_depth16(load_depth(align_est)),
                                   disparity_from_depth16(load_depth(align_ref)), options)});
            }
            const DatasetSummary summary = summarize(results);

            ordered_json doc;
            if (dir_mode) {
                doc["images"] = ordered_json::array();
                for (const auto &r : results) {
                    ordered_json j{{"name", r.name}};
                    j.update(pair_json(r.result));
                    doc["images"].push_back(j);
                }
                doc["summary"] = {{"abs_rel", summary.abs_rel},
                                  {"rmse", summary.rmse},
                                  {"n_images", summary.n_images}};
            } else {
                doc = pair_json(results.front().result);
            }
            write_json(align_out, doc);

            if (!align_csv.empty()) {
                std::ostringstream csv;
                csv << std::setprecision(12) << "name,scale,shift,abs_rel,rmse,n_valid\n";
                for (const auto &r : results) {
                    csv << r.name << ',' << r.result.fit.scale << ',' << r.result.fit.shift
                        << ',' << r.result.metrics.abs_rel << ',' << r.result.metrics.rmse
                        << ',' << r.result.metrics.n_valid << '\n';
                }
                csv << "mean,,," << summary.abs_rel << ',' << summary.rmse << ','
                    << summary.n_images << '\n';
                write_text(align_csv, csv.str());
            }
        };
    });

    // depth-metrics
    fs::path dm_pred, dm_ref, dm_out;
    double dm_units = 1000.0;
    auto *dmetrics = app.add_subcommand(
        "depth-metrics", "AbsRel and RMSE between two metric depth PNGs (reference 0 is invalid)");
    dmetrics->add_option("--pred", dm_pred, "Predicted depth, 16-bit PNG")
        ->required()
        ->check(CLI::ExistingFile);
    dmetrics->add_option("--ref", dm_ref, "Reference depth, 16-bit PNG")
        ->required()
        ->check(CLI::ExistingFile);
    dmetrics->add_option("--units-per-meter", dm_units, "Stored value of one meter")
        ->check(CLI::PositiveNumber);
    dmetrics->add_option("--out", dm_out, "Output JSON")->required();
    dmetrics->callback([&] {
        action = [&] {
            const DepthMap16 pred16 = read_depth_png(dm_pred);
            const DepthMap16 ref16 = read_depth_png(dm_ref);
            if (!pred16.same_size(ref16)) {
                throw Error(ErrorCode::DimensionMismatch, "depth maps differ in size");
            }
            MetricDepthMap pred(pred16.width(), pred16.height());
            MetricDepthMap ref(ref16.width(), ref16.height());
            ValidityMask mask(ref16.width(), ref16.height());
            for (std::size_t i = 0; i < ref16.values().size(); ++i) {
                pred.values()[i] = pred16.values()[i] / dm_units;
                ref.values()[i] = ref16.values()[i] / dm_units;
                mask.values()[i] = ref16.values()[i] > 0 ? 1 : 0;
            }
            const DepthMetrics m = depth_metrics(pred, ref, mask);
            write_json(dm_out, ordered_json{{"abs_rel", m.abs_rel},
                                            {"rmse", m.rmse},
                                            {"n_valid", m.n_valid}});
        };
    });

    // fid / is / clipsim
    fs::path fid_a, fid_b, fid_out;
    auto *fid = app.add_subcommand("fid", "Frechet distance between two feature sets");
    fid->add_option("--a", fid_a, "First feature file")->required()->check(CLI::ExistingFile);
    fid->add_option("--b", fid_b, "Second feature file")->required()->check(CLI::ExistingFile);
    fid->add_option("--out", fid_out, "Output JSON")->required();
    fid->callback([&] {
        action = [&] {
            const double d = frechet_distance(gaussian_stats(read_features(fid_a)),
                                              gaussian_stats(read_features(fid_b)));
            write_json(fid_out, ordered_json{{"fid", d}});
        };
    });

    fs::path is_in, is_out;
    std::size_t is_splits = kDefaultIsSplits;
    bool is_logits = false;
    auto *is = app.add_subcommand("is", "Inception score over class probabilities");
    is->add_option("--in", is_in, "Probability (or logit) rows")
        ->required()
        ->check(CLI::ExistingFile);
    is->add_option("--splits", is_splits, "Number of splits")->check(CLI::PositiveNumber);
    is->add_flag("--logits", is_logits, "Rows are logits, apply softmax first");
    is->add_option("--out", is_out, "Output JSON")->required();
    is->callback([&] {
        action = [&] {
            const FeatureSet rows = read_features(is_in);
            const ProbabilitySet probs = is_logits
                                             ? ProbabilitySet::from_logits(rows)
                                             : ProbabilitySet(rows.n(), rows.d(),
                                                              {rows.values().begin(),
                                                               rows.values().end()});
            const MeanStd s = inception_score(probs, is_splits);
            write_json(is_out, ordered_json{{"is_mean", s.mean}, {"is_std", s.std}});
        };
    });

    fs::path clip_img, clip_txt, clip_out;
    auto *clipsim = app.add_subcommand("clipsim", "Scaled cosine similarity of paired rows");
    clipsim->add_option("--img", clip_img, "Image embeddings")
        ->required()
        ->check(CLI::ExistingFile);
    clipsim->add_option("--txt", clip_txt, "Text embeddings")
        ->required()
        ->check(CLI::ExistingFile);
    clipsim->add_option("--out", clip_out, "Output JSON")->required();
    clipsim->callback([&] {
        action = [&] {
            const MeanStd s = clip_similarity(read_features(clip_img), read_features(clip_txt));
            write_json(clip_out, ordered_json{{"clip_mean", s.mean}, {"clip_std", s.std}});
        };
    });

    // mesh
    SceneOptions mesh_scene;
    fs::path mesh_out;
    auto *mesh = app.add_subcommand("mesh", "Write the displaced sphere as Wavefront OBJ");
    add_scene_options(mesh, mesh_scene);
    mesh->add_option("--out", mesh_out, "Output OBJ")->required();
    mesh->callback([&] {
        action = [&] { write_obj(mesh_out, load_scene(mesh_scene, false).mesh); };
    });

    // render
    SceneOptions render_scene;
    ViewOptions render_view_opts;
    fs::path render_out;
    auto *render = app.add_subcommand("render", "Render one perspective frame");
    add_scene_options(render, render_scene);
    add_view_options(render, render_view_opts);
    render->add_option("--out", render_out, "Output PNG")->required();
    render->callback([&] {
        action = [&] {
            const LoadedScene s = load_scene(render_scene, true);
            write_rgb_png(render_out, render_view(s.mesh, *s.texture,
                                                  make_viewpoint(render_view_opts),
                                                  raster_options(render_view_opts)));
        };
    });

    // stereo
    SceneOptions stereo_scene;
    ViewOptions stereo_view;
    double stereo_ipd = 0.064;
    fs::path stereo_left, stereo_right;
    auto *stereo = app.add_subcommand("stereo", "Render a left/right eye pair");
    add_scene_options(stereo, stereo_scene);
    add_view_options(stereo, stereo_view);
    stereo->add_option("--ipd", stereo_ipd, "Eye separation, negative swaps the eyes");
    stereo->add_option("--left", stereo_left, "Left eye PNG")->required();
    stereo->add_option("--right", stereo_right, "Right eye PNG")->required();
    stereo->callback([&] {
        action = [&] {
            const LoadedScene s = load_scene(stereo_scene, true);
            auto [left, right] =
                render_stereo_pair(s.mesh, *s.texture, make_viewpoint(stereo_view), stereo_ipd,
                                   raster_options(stereo_view));
            write_rgb_png(stereo_left, left);
            write_rgb_png(stereo_right, right);
        };
    });

    // orbit
    SceneOptions orbit_scene;
    ViewOptions orbit_view;
    std::size_t orbit_frames = 36;
    double orbit_radius = 0.1;
    bool orbit_open = false;
    fs::path orbit_dir;
    auto *orbit = app.add_subcommand(
        "orbit", "Render a circular camera path around --pos as numbered PNG frames");
    add_scene_options(orbit, orbit_scene);
    add_view_options(orbit, orbit_view);
    orbit->add_option("--frames", orbit_frames, "Frame count")->check(CLI::PositiveNumber);
    orbit->add_option("--orbit-radius", orbit_radius, "Radius of the horizontal circle")
        ->check(CLI::NonNegativeNumber);
    orbit->add_flag("--open", orbit_open, "Do not repeat the first viewpoint at the end");
    orbit->add_option("--out-dir", orbit_dir, "Frame directory")->required();
    orbit->callback([&] {
        action = [&] {
            const LoadedScene s = load_scene(orbit_scene, true);
            const auto path = circular_orbit(make_viewpoint(orbit_view), orbit_radius,
                                             orbit_frames, !orbit_open);
            const auto frames =
                orbit_sequence(s.mesh, *s.texture, path, orbit_dir, raster_options(orbit_view));
            out << frames.size() << " frames written to " << orbit_dir.string() << '\n';
        };
    });

    // export-scene
    SceneOptions export_opts;
    fs::path export_dir;
    auto *export_scene_cmd =
        app.add_subcommand("export-scene", "Write a scene bundle for the web viewer");
    add_scene_options(export_scene_cmd, export_opts);
    export_scene_cmd->add_option("--out-dir", export_dir, "Bundle directory")->required();
    export_scene_cmd->callback([&] {
        action = [&] {
            const LoadedScene s = load_scene(export_opts, true);
            export_scene(s.mesh, *s.texture, s.depth ? &*s.depth : nullptr, export_dir);
        };
    });

    // toy-train-ae
    std::vector<fs::path> ae_in;
    fs::path ae_out, ae_latents, ae_loss_csv;
    AutoencoderTrainOptions ae_opts;
    std::uint64_t ae_seed = 0;
    auto *train_ae = app.add_subcommand("toy-train-ae", "Train the linear KL autoencoder");
    train_ae->add_option("--in", ae_in, ".rgbd files or directories of them")
        ->required()
        ->check(CLI::ExistingPath);
    train_ae->add_option("--seed", ae_seed, "Seed for init and minibatches")->required();
    train_ae->add_option("--steps", ae_opts.steps, "Optimizer steps");
    train_ae->add_option("--lr", ae_opts.learning_rate, "Adam learning rate")
        ->check(CLI::PositiveNumber);
    train_ae->add_option("--reg-weight", ae_opts.reg_weight, "KL weight")
        ->check(CLI::NonNegativeNumber);
    train_ae->add_option("--batch-blocks", ae_opts.batch_blocks,
                         "Blocks per minibatch, 0 uses every block");
    train_ae->add_option("--out", ae_out, "Output .toymodel")->required();
    train_ae->add_option("--latents-out", ae_latents, "Posterior means as a feature file");
    train_ae->add_option("--loss-csv", ae_loss_csv, "Per-step loss history");
    train_ae->callback([&] {
        action = [&] {
            std::vector<RgbdTensor> data;
            for (const auto &p : expand_rgbd_inputs(ae_in)) {
                data.push_back(read_rgbd(p));
            }
            ae_opts.seed = ae_seed;
            const auto result = train_toy_autoencoder(data, ae_opts);
            save_checkpoint(ae_out, result.model);
            ordered_json summary{{"tensors", data.size()},
                                 {"initial_loss", result.loss_history.empty()
                                                      ? result.final_loss
                                                      : result.loss_history.front()},
                                 {"final_loss", result.final_loss}};
            if (!ae_latents.empty()) {
                std::vector<LatentTensor> latents;
                for (const auto &t : data) {
                    latents.push_back(result.model.encode(t));
                }
                for (const auto &z : latents) {
                    if (!z.same_shape(latents.front())) {
                        throw Error(ErrorCode::ShapeMismatch,
                                    "inputs encode to different latent shapes");
                    }
                }
                write_features(ae_latents, features_from(latents));
                summary["latent_shape"] = std::to_string(latents.front().height()) + "x" +
                                          std::to_string(latents.front().width());
            }
            if (!ae_loss_csv.empty()) {
                write_loss_csv(ae_loss_csv, result.loss_history);
            }
            out << summary.dump() << '\n';
        };
    });

    // toy-train-denoiser
    fs::path dn_latents, dn_labels, dn_out, dn_loss_csv;
    std::string dn_shape;
    DenoiserTrainOptions dn_opts;
    std::uint64_t dn_seed = 0;
    std::size_t dn_T = kDefaultScheduleSteps;
    double dn_beta_min = kDefaultBetaMin;
    double dn_beta_max = kDefaultBetaMax;
    auto *train_dn = app.add_subcommand("toy-train-denoiser", "Train the linear noise predictor");
    train_dn->add_option("--latents", dn_latents, "Latent rows as a feature file")
        ->required()
        ->check(CLI::ExistingFile);
    train_dn->add_option("--latent-shape", dn_shape, "HxW of each row, empty means 1x(d/4)");
    train_dn->add_option("--labels", dn_labels, "Condition flags, one 0/1 per row")
        ->check(CLI::ExistingFile);
    train_dn->add_option("--seed", dn_seed, "Seed for draws")->required();
    train_dn->add_option("--steps", dn_opts.steps, "Optimizer steps");
    train_dn->add_option("--lr", dn_opts.learning_rate, "Adam learning rate")
        ->check(CLI::PositiveNumber);
    train_dn->add_option("--batch", dn_opts.batch, "Draws per step")->check(CLI::PositiveNumber);
    train_dn->add_option("--uncond-prob", dn_opts.uncond_prob,
                         "Probability of dropping the condition")
        ->check(CLI::Range(0.0, 1.0));
    train_dn->add_option("--schedule-steps", dn_T, "Diffusion steps T")
        ->check(CLI::PositiveNumber);
    train_dn->add_option("--beta-min", dn_beta_min, "First beta");
    train_dn->add_option("--beta-max", dn_beta_max, "Last beta");
    train_dn->add_option("--out", dn_out, "Output .toymodel")->required();
    train_dn->add_option("--loss-csv", dn_loss_csv, "Per-step loss history");
    train_dn->callback([&] {
        action = [&] {
            const FeatureSet rows = read_features(dn_latents);
            const auto latents = latents_from(rows, parse_latent_shape(dn_shape, rows.d()));
            std::vector<std::uint8_t> labels;
            if (!dn_labels.empty()) {
                labels = read_labels(dn_labels, rows.n());
            }
            const NoiseSchedule schedule = make_noise_schedule(dn_T, dn_beta_min, dn_beta_max);
            dn_opts.seed = dn_seed;
            const auto result = train_toy_denoiser(latents, schedule, dn_opts, labels);
            save_checkpoint(dn_out, result.model, schedule);
            if (!dn_loss_csv.empty()) {
                write_loss_csv(dn_loss_csv, result.loss_history);
            }
            const std::size_t window = std::max<std::size_t>(1, result.loss_history.size() / 10);
            const LossTrend trend = loss_trend(result.loss_history, window);
            out << ordered_json{{"initial_loss", trend.initial}, {"final_loss", trend.final}}.dump()
                << '\n';
        };
    });

    // toy-sample
    fs::path smp_model, smp_out, smp_ae, smp_dir;
    std::uint64_t smp_seed = 0;
    std::size_t smp_count = 1;
    GuidanceConfig smp_cfg;
    bool smp_uncond = false;
    auto *sample = app.add_subcommand("toy-sample", "Draw latents with guided DDIM");
    sample->add_option("--model", smp_model, "Denoiser .toymodel")
        ->required()
        ->check(CLI::ExistingFile);
    sample->add_option("--seed", smp_seed, "Seed for the starting noise")->required();
    sample->add_option("--count", smp_count, "Number of samples")->check(CLI::PositiveNumber);
    sample->add_option("--scale", smp_cfg.scale, "Guidance scale");
    sample->add_option("--ddim-steps", smp_cfg.ddim_steps, "Sampler steps")
        ->check(CLI::PositiveNumber);
    sample->add_option("--eta", smp_cfg.eta, "Stochasticity, only 0 is supported");
    sample->add_flag("--uncond", smp_uncond, "Sample without the condition");
    sample->add_option("--out", smp_out, "Latent rows as a feature file")->required();
    auto *decode_with = sample->add_option("--decode-with", smp_ae, "Autoencoder .toymodel")
                            ->check(CLI::ExistingFile);
    sample->add_option("--decode-dir", smp_dir, "Directory for decoded .rgbd samples")
        ->needs(decode_with);
    decode_with->needs("--decode-dir");
    sample->callback([&] {
        action = [&] {
            const DenoiserCheckpoint ckpt = load_denoiser(smp_model);
            const auto samples =
                draw_samples(ckpt.model, ckpt, smp_cfg, smp_count, smp_seed, !smp_uncond);
            write_features(smp_out, features_from(samples));
            if (!smp_ae.empty()) {
                const LinearAutoencoder ae = load_autoencoder(smp_ae);
                fs::create_directories(smp_dir);
                for (std::size_t i = 0; i < samples.size(); ++i) {
                    char name[32];
                    std::snprintf(name, sizeof name, "sample_%05zu.rgbd", i);
                    write_rgbd(smp_dir / name, ae.decode(samples[i]));
                }
            }
        };
    });

    // sweep
    fs::path sw_model, sw_ref, sw_out;
    std::uint64_t sw_seed = 0;
    std::size_t sw_count = 64;
    std::vector<double> sw_scales{1.0, 2.0, 3.0, 5.0, 9.0};
    std::vector<std::size_t> sw_steps{10, 25, 50};
    bool sw_uncond = false;
    auto *sweep = app.add_subcommand(
        "sweep", "FID of sampled latents against reference latents over guidance scales and "
                 "DDIM step counts");
    sweep->add_option("--model", sw_model, "Denoiser .toymodel")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--reference", sw_ref, "Reference latent rows")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--seed", sw_seed, "Seed for the starting noise, shared by all cells")
        ->required();
    sweep->add_option("--count", sw_count, "Samples per cell")->check(CLI::Range(2, 1 << 20));
    sweep->add_option("--scales", sw_scales, "Guidance scales")->delimiter(',');
    sweep->add_option("--steps", sw_steps, "DDIM step counts")->delimiter(',');
    sweep->add_flag("--uncond", sw_uncond, "Sample without the condition");
    sweep->add_option("--out", sw_out, "Output CSV, stdout when empty");
    sweep->callback([&] {
        action = [&] {
            const DenoiserCheckpoint ckpt = load_denoiser(sw_model);
            const GaussianStats ref_stats = gaussian_stats(read_features(sw_ref));
            const auto rows = sweep_harness(sw_scales, sw_steps, [&](const GuidanceConfig &c) {
                const auto samples = draw_samples(ckpt.model, ckpt, c, sw_count, sw_seed,
                                                  !sw_uncond);
                return frechet_distance(gaussian_stats(features_from(samples)), ref_stats);
            });
            std::ostringstream csv;
            write_sweep_csv(csv, rows);
            if (sw_out.empty()) {
                out << csv.str();
            } else {
                write_text(sw_out, csv.str());
            }
        };
    });

    // serve
    fs::path srv_bundle, srv_assets;
    std::string srv_host = "127.0.0.1";
    int srv_port = 8080;
    auto *serve = app.add_subcommand(
        "serve", "Serve a scene bundle at /scene/ and viewer assets at / as static files");
    serve->add_option("--bundle", srv_bundle, "Scene bundle directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    serve->add_option("--assets", srv_assets, "Viewer asset directory")
        ->check(CLI::ExistingDirectory);
    serve->add_option("--host", srv_host, "Bind address");
    serve->add_option("--port", srv_port, "TCP port")->check(CLI::Range(1, 65535));
    serve->callback([&] {
        action = [&] {
            std::optional<fs::path> assets;
            if (!srv_assets.empty()) {
                assets = srv_assets;
            }
            auto server = make_static_server(srv_bundle, assets);
            out << "serving http://" << srv_host << ':' << srv_port << "/\n" << std::flush;
            if (!server->listen(srv_host, srv_port)) {
                throw Error(ErrorCode::IoError, "cannot listen on " + srv_host + ':' +
                                                    std::to_string(srv_port));
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        if (app.get_subcommands().empty() && argc > 1 && argv[1][0] != '-') {
            err << "unknown subcommand: " << argv[1] << '\n';
        } else {
            app.exit(e, err, err);
        }
        if (app.get_subcommands().empty()) {
            err << app.help();
        }
        return kExitUsage;
    }

    try {
        action();
    } catch (const std::exception &e) {
        // ldm3d::Error messages already lead with their code name
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

} // namespace ldm3d::cli
