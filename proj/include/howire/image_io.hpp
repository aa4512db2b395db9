#ifndef HOWIRE_IMAGE_IO_HPP
#define HOWIRE_IMAGE_IO_HPP

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "howire/camera.hpp"
#include "howire/error.hpp"
#include "howire/raster.hpp"
#include "howire/wireframe.hpp"

namespace howire {

inline std::vector<std::uint8_t> encode_png(const RgbImage& img) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr))
        throw FormatError(std::string("png encode failed: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(), 0, nullptr))
        throw FormatError(std::string("png encode failed: ") + image.message);
    out.resize(size);
    return out;
}

inline RgbImage decode_png(const std::vector<std::uint8_t>& bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw FormatError(std::string("png decode failed: ") + image.message);
    image.format = PNG_FORMAT_RGB;
    RgbImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw FormatError(std::string("png decode failed: ") + image.message);
    }
    return out;
}

/// Label palette for wireframe overlays.
namespace palette {
inline constexpr Rgb line_visible{0, 0, 128};      // navy blue
inline constexpr Rgb line_hidden{210, 180, 140};   // tan
inline constexpr Rgb junction_visible{0, 128, 128};
inline constexpr Rgb junction_fleeting{255, 0, 255};
inline constexpr Rgb junction_hidden{0, 0, 0};
} // namespace palette

inline void draw_segment(RgbImage& img, Vec2 a, Vec2 b, Rgb color) {
    const double len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    const int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::floor(a.x + t * (b.x - a.x)));
        const int y = static_cast<int>(std::floor(a.y + t * (b.y - a.y)));
        if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.set(x, y, color);
    }
}

/// Paints the labeled wireframe (hidden lines first so visible ones stay on top).
inline void draw_wireframe_overlay(RgbImage& img, const WireframeGraph& g, const CameraIntrinsics& k) {
    std::vector<Vec2> pts;
    pts.reserve(g.junction_count());
    for (Vec3 j : g.junctions3d) pts.push_back(project(j, k));
    for (int pass = 0; pass < 2; ++pass) {
        const LineVisibility want = pass == 0 ? LineVisibility::hidden : LineVisibility::visible;
        for (std::size_t i = 0; i < g.lines.size(); ++i) {
            const LineVisibility v = g.line_visibility.empty() ? LineVisibility::visible : g.line_visibility[i];
            if (v != want) continue;
            draw_segment(img, pts[g.lines[i].m], pts[g.lines[i].n],
                         v == LineVisibility::visible ? palette::line_visible : palette::line_hidden);
        }
    }
    for (std::size_t j = 0; j < pts.size(); ++j) {
        Rgb c = palette::junction_visible;
        if (!g.junction_class.empty()) {
            if (g.junction_class[j] == JunctionClass::fleeting) c = palette::junction_fleeting;
            if (g.junction_class[j] == JunctionClass::hidden) c = palette::junction_hidden;
        }
        const int cx = static_cast<int>(std::floor(pts[j].x)), cy = static_cast<int>(std::floor(pts[j].y));
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (cx + dx >= 0 && cy + dy >= 0 && cx + dx < img.width && cy + dy < img.height)
                    img.set(cx + dx, cy + dy, c);
    }
}

} // namespace howire

#endif
