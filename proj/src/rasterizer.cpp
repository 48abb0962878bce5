// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/rasterizer.hpp"

#include "ldm3d/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

namespace ldm3d {

namespace {

/// Barycentric slack so pixels centred exactly on a shared edge are covered
/// by at least one of the two triangles; the z-test resolves the overlap.
constexpr double kEdgeTolerance = 1e-9;

struct ClipVertex {
    double x, y, z; // camera space, z along the view axis
    double u, v;
};

struct ScreenVertex {
    double sx, sy;
    double inv_z;
    double u_over_z, v_over_z;
};

struct TriangleSetup {
    ScreenVertex v[3];
    double inv_area;
    int xmin, xmax, ymin, ymax;
};

double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

ClipVertex lerp(const ClipVertex &a, const ClipVertex &b, double t) {
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.z + (b.z - a.z) * t,
            a.u + (b.u - a.u) * t, a.v + (b.v - a.v) * t};
}

/// Sutherland-Hodgman against z >= near. A triangle yields at most four vertices.
int clip_near(const ClipVertex (&in)[3], double near, ClipVertex (&out)[4]) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const ClipVertex &a = in[i];
        const ClipVertex &b = in[(i + 1) % 3];
        const bool a_in = a.z >= near;
        const bool b_in = b.z >= near;
        if (a_in) {
            out[n++] = a;
        }
        if (a_in != b_in) {
            out[n++] = lerp(a, b, (near - a.z) / (b.z - a.z));
        }
    }
    return n;
}

} // namespace

CameraBasis camera_basis(const Viewpoint &vp) {
    const double cp = std::cos(vp.pitch);
    const Vec3 forward{cp * std::cos(vp.yaw), std::sin(vp.pitch), cp * std::sin(vp.yaw)};
    const Vec3 right{-std::sin(vp.yaw), 0.0, std::cos(vp.yaw)};
    return {forward, right, cross(right, forward)};
}

void validate_viewpoint(const Viewpoint &vp) {
    if (!(vp.fov_y > 0.0 && vp.fov_y < std::numbers::pi)) {
        throw Error(ErrorCode::InvalidArgument, "fov_y must lie in (0, pi)");
    }
    if (vp.width == 0 || vp.height == 0) {
        throw Error(ErrorCode::InvalidArgument, "viewpoint image size must be positive");
    }
    if (!std::isfinite(vp.position.x) || !std::isfinite(vp.position.y) ||
        !std::isfinite(vp.position.z) || !std::isfinite(vp.yaw) || !std::isfinite(vp.pitch)) {
        throw Error(ErrorCode::InvalidArgument, "viewpoint pose must be finite");
    }
}

Vec3 pixel_ray(const Viewpoint &vp, double x, double y) {
    const CameraBasis basis = camera_basis(vp);
    const double tan_half = std::tan(0.5 * vp.fov_y);
    const double aspect = static_cast<double>(vp.width) / static_cast<double>(vp.height);
    const double ndc_x = 2.0 * x / static_cast<double>(vp.width) - 1.0;
    const double ndc_y = 1.0 - 2.0 * y / static_cast<double>(vp.height);
    return normalized(basis.forward + (ndc_x * aspect * tan_half) * basis.right +
                      (ndc_y * tan_half) * basis.up);
}

std::array<double, 3> sample_texture(const RgbImage &texture, double u, double v) {
    const auto w = static_cast<std::ptrdiff_t>(texture.width());
    const auto h = static_cast<std::ptrdiff_t>(texture.height());
    const double x = u * static_cast<double>(w) - 0.5;
    const double y = std::clamp(v * static_cast<double>(h) - 0.5, 0.0, static_cast<double>(h - 1));
    const double xf = std::floor(x);
    const double yf = std::floor(y);
    const double fx = x - xf;
    const double fy = y - yf;
    auto wrap = [w](std::ptrdiff_t i) { return static_cast<std::size_t>(((i % w) + w) % w); };
    const std::size_t x0 = wrap(static_cast<std::ptrdiff_t>(xf));
    const std::size_t x1 = wrap(static_cast<std::ptrdiff_t>(xf) + 1);
    const auto y0 = static_cast<std::size_t>(yf);
    const std::size_t y1 = std::min(y0 + 1, static_cast<std::size_t>(h - 1));
    std::array<double, 3> rgb{};
    for (std::size_t c = 0; c < 3; ++c) {
        const double a = texture.at(x0, y0, c);
        const double b = texture.at(x1, y0, c);
        const double cc = texture.at(x0, y1, c);
        const double d = texture.at(x1, y1, c);
        const double top = a + (b - a) * fx;
        const double bottom = cc + (d - cc) * fx;
        rgb[c] = top + (bottom - top) * fy;
    }
    return rgb;
}

RgbImage rasterize(std::span<const Vec3> positions, std::span<const Uv> uvs,
                   std::span<const Triangle> triangles, const RgbImage &texture,
                   const Viewpoint &vp, const RasterOptions &options) {
    validate_viewpoint(vp);
    if (positions.size() != uvs.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one UV per vertex is required");
    }
    if (!(options.near_plane > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "near plane must be positive");
    }
    const CameraBasis basis = camera_basis(vp);
    const auto width = static_cast<int>(vp.width);
    const auto height = static_cast<int>(vp.height);
    const double focal = 1.0 / std::tan(0.5 * vp.fov_y);
    const double aspect = static_cast<double>(vp.width) / static_cast<double>(vp.height);

    std::vector<ClipVertex> cam(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Vec3 d = positions[i] - vp.position;
        cam[i] = {dot(d, basis.right), dot(d, basis.up), dot(d, basis.forward), uvs[i].u, uvs[i].v};
    }

    auto project = [&](const ClipVertex &c) {
        const double inv_z = 1.0 / c.z;
        return ScreenVertex{(focal * c.x * inv_z / aspect + 1.0) * 0.5 * width,
                            (1.0 - focal * c.y * inv_z) * 0.5 * height, inv_z, c.u * inv_z,
                            c.v * inv_z};
    };

    std::vector<TriangleSetup> setups;
    setups.reserve(triangles.size() / 4);
    for (const Triangle &tri : triangles) {
        for (std::uint32_t k : tri) {
            if (k >= cam.size()) {
                throw Error(ErrorCode::InvalidArgument, "triangle references a missing vertex");
            }
        }
        const ClipVertex in[3] = {cam[tri[0]], cam[tri[1]], cam[tri[2]]};
        if (in[0].z < options.near_plane && in[1].z < options.near_plane &&
            in[2].z < options.near_plane) {
            continue;
        }
        ClipVertex poly[4];
        const int count = clip_near(in, options.near_plane, poly);
        ScreenVertex screen[4];
        for (int i = 0; i < count; ++i) {
            screen[i] = project(poly[i]);
        }
        for (int i = 1; i + 1 < count; ++i) {
            TriangleSetup s{{screen[0], screen[i], screen[i + 1]}, 0.0, 0, 0, 0, 0};
            const double area = edge(s.v[0].sx, s.v[0].sy, s.v[1].sx, s.v[1].sy, s.v[2].sx, s.v[2].sy);
            if (std::abs(area) < 1e-12) {
                continue;
            }
            const double min_x = std::min({s.v[0].sx, s.v[1].sx, s.v[2].sx});
            const double max_x = std::max({s.v[0].sx, s.v[1].sx, s.v[2].sx});
            const double min_y = std::min({s.v[0].sy, s.v[1].sy, s.v[2].sy});
            const double max_y = std::max({s.v[0].sy, s.v[1].sy, s.v[2].sy});
            if (max_x < 0.0 || max_y < 0.0 || min_x > width || min_y > height) {
                continue;
            }
            s.inv_area = 1.0 / area;
            s.xmin = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
            s.xmax = std::min(width - 1, static_cast<int>(std::ceil(max_x)));
            s.ymin = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
            s.ymax = std::min(height - 1, static_cast<int>(std::ceil(max_y)));
            setups.push_back(s);
        }
    }

    RgbImage frame(vp.width, vp.height);
    std::vector<double> depth(vp.width * vp.height, 0.0); // stores 1/z, larger is nearer

    auto fill_band = [&](int y_begin, int y_end) {
        for (const TriangleSetup &s : setups) {
            const int y0 = std::max(s.ymin, y_begin);
            const int y1 = std::min(s.ymax, y_end - 1);
            if (y0 > y1) {
                continue;
            }
            const ScreenVertex &a = s.v[0];
            const ScreenVertex &b = s.v[1];
            const ScreenVertex &c = s.v[2];
            for (int y = y0; y <= y1; ++y) {
                const double py = y + 0.5;
                for (int x = s.xmin; x <= s.xmax; ++x) {
                    const double px = x + 0.5;
                    const double l0 = edge(b.sx, b.sy, c.sx, c.sy, px, py) * s.inv_area;
                    const double l1 = edge(c.sx, c.sy, a.sx, a.sy, px, py) * s.inv_area;
                    const double l2 = 1.0 - l0 - l1;
                    if (l0 < -kEdgeTolerance || l1 < -kEdgeTolerance || l2 < -kEdgeTolerance) {
                        continue;
                    }
                    const double inv_z = l0 * a.inv_z + l1 * b.inv_z + l2 * c.inv_z;
                    const std::size_t idx = static_cast<std::size_t>(y) * vp.width + x;
                    if (!(inv_z > depth[idx])) {
                        continue;
                    }
                    depth[idx] = inv_z;
                    const double u = (l0 * a.u_over_z + l1 * b.u_over_z + l2 * c.u_over_z) / inv_z;
                    const double v = (l0 * a.v_over_z + l1 * b.v_over_z + l2 * c.v_over_z) / inv_z;
                    const auto rgb = sample_texture(texture, u, v);
                    auto px_out = frame.pixel(idx);
                    for (std::size_t ch = 0; ch < 3; ++ch) {
                        px_out[ch] = static_cast<std::uint8_t>(
                            std::lround(std::clamp(rgb[ch], 0.0, 255.0)));
                    }
                }
            }
        }
    };

    std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, vp.height);
    if (threads == 1) {
        fill_band(0, height);
    } else {
        // Bands own disjoint rows of the frame and depth buffer.
        const int band = static_cast<int>((vp.height + threads - 1) / threads);
        std::vector<std::jthread> workers;
        for (int y = 0; y < height; y += band) {
            workers.emplace_back(fill_band, y, std::min(height, y + band));
        }
    }
    return frame;
}

} // namespace ldm3d
