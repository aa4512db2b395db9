#ifndef HOWIRE_RASTER_HPP
#define HOWIRE_RASTER_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "howire/camera.hpp"
#include "howire/error.hpp"
#include "howire/mesh.hpp"

namespace howire {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend constexpr bool operator==(Rgb, Rgb) = default;
};

/// 8-bit RGB image, row-major, 3 bytes per pixel.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RgbImage() = default;
    RgbImage(int w, int h, Rgb fill) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
        for (std::size_t i = 0; i < pixels.size(); i += 3) {
            pixels[i] = fill.r;
            pixels[i + 1] = fill.g;
            pixels[i + 2] = fill.b;
        }
    }

    Rgb at(int x, int y) const {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        pixels[i] = c.r;
        pixels[i + 1] = c.g;
        pixels[i + 2] = c.b;
    }
};

/// Nearest-surface camera-frame Z per pixel; +infinity where nothing was drawn.
struct DepthBuffer {
    int width = 0;
    int height = 0;
    std::vector<double> depth;

    DepthBuffer() = default;
    DepthBuffer(int w, int h)
        : width(w), height(h), depth(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity()) {}

    double at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }
    std::size_t covered() const {
        return static_cast<std::size_t>(std::count_if(depth.begin(), depth.end(), [](double d) { return std::isfinite(d); }));
    }
};

/// Lambertian shading setup. `light` points from the surface toward the light (camera frame).
struct ShadingParams {
    Vec3 light{1.0, 1.0, -1.0};
    double ambient = 0.25;
    double diffuse = 0.75;
    double albedo = 0.8;
    Rgb background{255, 255, 255};
    double near_plane = 1e-3;
};

struct RenderResult {
    RgbImage image;
    DepthBuffer depth;
    std::vector<std::string> warnings;
};

namespace detail {

/// Sutherland-Hodgman against z >= near.
inline std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri, double near) {
    std::vector<Vec3> out;
    out.reserve(4);
    for (int i = 0; i < 3; ++i) {
        const Vec3 a = tri[i], b = tri[(i + 1) % 3];
        const bool a_in = a.z >= near, b_in = b.z >= near;
        if (a_in) out.push_back(a);
        if (a_in != b_in) {
            const double t = (near - a.z) / (b.z - a.z);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

} // namespace detail

/// Z-buffer rasterization of a camera-frame mesh with perspective-correct depth.
///
/// Pixels are sampled at their centers; 1/Z is interpolated linearly in
/// screen space, which is exact for planar triangles.
inline RenderResult rasterize(const TriangleMesh& mesh_camera, const CameraIntrinsics& k,
                              const ShadingParams& shading = {}) {
    RenderResult out{RgbImage(k.width, k.height, shading.background), DepthBuffer(k.width, k.height), {}};
    const Vec3 light = normalized(shading.light);
    std::size_t drawn = 0;

    for (std::size_t t = 0; t < mesh_camera.size(); ++t) {
        const auto corners = mesh_camera.corners(t);
        const std::vector<Vec3> poly = detail::clip_near(corners, shading.near_plane);
        if (poly.size() < 3) continue;
        ++drawn;

        const double lambert = std::max(0.0, dot(mesh_camera.normal(t), light));
        const std::uint8_t gray = detail::to_byte(shading.albedo * (shading.ambient + shading.diffuse * lambert));
        const Rgb color{gray, gray, gray};

        for (std::size_t f = 1; f + 1 < poly.size(); ++f) {
            const std::array<Vec3, 3> v{poly[0], poly[f], poly[f + 1]};
            std::array<double, 3> sx{}, sy{}, inv_z{};
            for (int i = 0; i < 3; ++i) {
                sx[i] = k.fx * v[i].x / v[i].z + k.cx;
                sy[i] = k.fy * v[i].y / v[i].z + k.cy;
                inv_z[i] = 1.0 / v[i].z;
            }
            const double area = (sx[1] - sx[0]) * (sy[2] - sy[0]) - (sx[2] - sx[0]) * (sy[1] - sy[0]);
            if (area == 0.0) continue;

            const int x0 = std::max(0, static_cast<int>(std::floor(std::min({sx[0], sx[1], sx[2]}) - 0.5)));
            const int x1 = std::min(k.width - 1, static_cast<int>(std::ceil(std::max({sx[0], sx[1], sx[2]}) - 0.5)));
            const int y0 = std::max(0, static_cast<int>(std::floor(std::min({sy[0], sy[1], sy[2]}) - 0.5)));
            const int y1 = std::min(k.height - 1, static_cast<int>(std::ceil(std::max({sy[0], sy[1], sy[2]}) - 0.5)));

            for (int py = y0; py <= y1; ++py) {
                const double qy = py + 0.5;
                for (int px = x0; px <= x1; ++px) {
                    const double qx = px + 0.5;
                    const double w0 = ((sx[2] - sx[1]) * (qy - sy[1]) - (sy[2] - sy[1]) * (qx - sx[1])) / area;
                    const double w1 = ((sx[0] - sx[2]) * (qy - sy[2]) - (sy[0] - sy[2]) * (qx - sx[2])) / area;
                    const double w2 = 1.0 - w0 - w1;
                    if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                    const double z = 1.0 / (w0 * inv_z[0] + w1 * inv_z[1] + w2 * inv_z[2]);
                    double& slot = out.depth.at(px, py);
                    if (z < slot) {
                        slot = z;
                        out.image.set(px, py, color);
                    }
                }
            }
        }
    }
    if (!mesh_camera.empty() && drawn == 0) out.warnings.push_back("empty render: every triangle is behind the camera");
    return out;
}

/// Raw depth dump: "HOWD", width, height, reserved (u32 LE each), then float32 LE row-major.
inline std::vector<std::uint8_t> encode_depth_raw(const DepthBuffer& depth) {
    std::vector<std::uint8_t> out(16 + depth.depth.size() * 4);
    std::size_t pos = 0;
    auto put_u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out[pos++] = static_cast<std::uint8_t>(v >> (8 * i));
    };
    for (char c : {'H', 'O', 'W', 'D'}) out[pos++] = static_cast<std::uint8_t>(c);
    put_u32(static_cast<std::uint32_t>(depth.width));
    put_u32(static_cast<std::uint32_t>(depth.height));
    put_u32(0);
    for (double d : depth.depth) put_u32(std::bit_cast<std::uint32_t>(static_cast<float>(d)));
    return out;
}

inline DepthBuffer decode_depth_raw(const std::vector<std::uint8_t>& bytes) {
    auto get_u32 = [&](std::size_t off) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[off + i]) << (8 * i);
        return v;
    };
    if (bytes.size() < 16 || std::memcmp(bytes.data(), "HOWD", 4) != 0) throw FormatError("not a HOWD depth file");
    DepthBuffer d(static_cast<int>(get_u32(4)), static_cast<int>(get_u32(8)));
    if (bytes.size() != 16 + d.depth.size() * 4) throw FormatError("HOWD depth file has wrong payload size");
    for (std::size_t i = 0; i < d.depth.size(); ++i) d.depth[i] = std::bit_cast<float>(get_u32(16 + 4 * i));
    return d;
}

} // namespace howire

#endif
