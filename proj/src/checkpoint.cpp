// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/checkpoint.hpp"

#include "ldm3d/binary_io.hpp"
#include "ldm3d/error.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace ldm3d {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char *kFormatName = "ldm3d-toymodel";

void write_file(const std::filesystem::path &path, const json &header,
                std::span<const double> weights) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    const std::string text = header.dump();
    binary::put_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (double w : weights) {
        binary::put_f32(out, static_cast<float>(w));
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

struct RawCheckpoint {
    json header;
    std::vector<double> weights;
};

RawCheckpoint read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::uint32_t length = 0;
    if (!binary::get_u32(in, length)) {
        throw Error(ErrorCode::FormatError, path.string() + ": truncated checkpoint header");
    }
    std::string text(length, '\0');
    if (!in.read(text.data(), length)) {
        throw Error(ErrorCode::FormatError, path.string() + ": truncated checkpoint header");
    }
    RawCheckpoint raw;
    try {
        raw.header = json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::FormatError, path.string() + ": bad checkpoint header: " + e.what());
    }
    std::size_t count = 0;
    try {
        if (!raw.header.is_object() || raw.header.value("format", "") != kFormatName) {
            throw Error(ErrorCode::FormatError, path.string() + " is not a toy model checkpoint");
        }
        if (raw.header.value("version", 0) != kFormatVersion) {
            throw Error(ErrorCode::VersionMismatch,
                        path.string() + ": unsupported checkpoint version");
        }
        count = raw.header.at("weight_count").get<std::size_t>();
    } catch (const json::exception &e) {
        throw Error(ErrorCode::FormatError, path.string() + ": bad checkpoint header: " + e.what());
    }
    raw.weights.resize(count);
    for (double &w : raw.weights) {
        float f = 0.0f;
        if (!binary::get_f32(in, f)) {
            throw Error(ErrorCode::FormatError, path.string() + ": truncated weight blob");
        }
        w = f;
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorCode::FormatError, path.string() + ": trailing bytes after weights");
    }
    return raw;
}

} // namespace

void save_checkpoint(const std::filesystem::path &path, const LinearAutoencoder &model) {
    json header = {
        {"format", kFormatName},
        {"version", kFormatVersion},
        {"kind", "autoencoder"},
        {"downsample_factor", LinearAutoencoder::kFactor},
        {"block_values", LinearAutoencoder::kBlock},
        {"latent_channels", LinearAutoencoder::kLatent},
        {"weight_count", LinearAutoencoder::kParamCount},
    };
    write_file(path, header, model.params());
}

void save_checkpoint(const std::filesystem::path &path, const DenoiserModel &model,
                     const NoiseSchedule &schedule) {
    json header = {
        {"format", kFormatName},
        {"version", kFormatVersion},
        {"kind", "denoiser"},
        {"latent_shape", {model.latent_height(), model.latent_width(), LatentTensor::channels}},
        {"schedule",
         {{"steps", schedule.steps}, {"beta_min", schedule.beta_min}, {"beta_max", schedule.beta_max}}},
        {"weight_shape", {model.latent_dim(), model.input_dim()}},
        {"weight_count", model.weights().size()},
    };
    write_file(path, header, model.weights());
}

ToyCheckpoint load_checkpoint(const std::filesystem::path &path) {
    RawCheckpoint raw = read_file(path);
    const std::string kind = raw.header.value("kind", "");
    try {
        if (kind == "autoencoder") {
            return LinearAutoencoder(std::move(raw.weights));
        }
        if (kind == "denoiser") {
            const auto &shape = raw.header.at("latent_shape");
            const auto &sch = raw.header.at("schedule");
            NoiseSchedule schedule = make_noise_schedule(sch.at("steps").get<std::size_t>(),
                                                         sch.at("beta_min").get<double>(),
                                                         sch.at("beta_max").get<double>());
            DenoiserModel model(shape.at(0).get<std::size_t>(), shape.at(1).get<std::size_t>(),
                                schedule.steps, std::move(raw.weights));
            return DenoiserCheckpoint{std::move(model), std::move(schedule)};
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::FormatError, path.string() + ": bad checkpoint header: " + e.what());
    }
    throw Error(ErrorCode::FormatError, path.string() + ": unknown model kind '" + kind + "'");
}

LinearAutoencoder load_autoencoder(const std::filesystem::path &path) {
    auto ckpt = load_checkpoint(path);
    if (auto *ae = std::get_if<LinearAutoencoder>(&ckpt)) {
        return std::move(*ae);
    }
    throw Error(ErrorCode::FormatError, path.string() + " holds a denoiser, not an autoencoder");
}

DenoiserCheckpoint load_denoiser(const std::filesystem::path &path) {
    auto ckpt = load_checkpoint(path);
    if (auto *dn = std::get_if<DenoiserCheckpoint>(&ckpt)) {
        return std::move(*dn);
    }
    throw Error(ErrorCode::FormatError, path.string() + " holds an autoencoder, not a denoiser");
}

} // namespace ldm3d
