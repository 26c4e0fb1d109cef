#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "planbench/observe.hpp"
#include "planbench/scene.hpp"

namespace planbench {

inline constexpr int kImageSize = 512;
inline constexpr int kCellPixels = 64;

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::array<std::uint8_t, 3> at(int x, int y) const {
    const std::size_t o = 3 * (static_cast<std::size_t>(y) * width + x);
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
  }
  bool operator==(const RgbImage&) const = default;
};

/// Where an object is drawn. Independent of the render style.
struct LayoutEntry {
  std::string id;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open pixel rectangle
  int depth = 0;                       // support links below the object
  bool operator==(const LayoutEntry&) const = default;
};

/// Layout of every drawn (visible, placeable) object, in draw order.
std::vector<LayoutEntry> layout(const Scene& scene);

RgbImage rasterize(const Scene& scene, RenderStyle style);

std::vector<std::uint8_t> encode_png(const RgbImage& image);
/// Decodes the 8-bit RGB, non-interlaced PNGs this module writes.
RgbImage decode_png(const std::vector<std::uint8_t>& png);

/// 512x512 top-down PNG of the scene; closed containers are opaque.
std::vector<std::uint8_t> render_image(const Scene& scene, RenderStyle style);

std::array<std::uint8_t, 3> palette_rgb(Color c, RenderStyle style);

}  // namespace planbench
