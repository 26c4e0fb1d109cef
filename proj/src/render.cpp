#include "planbench/render.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>

#include "planbench/error.hpp"

namespace planbench {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr std::array<std::array<std::uint8_t, 7>, 26> kFont = {{
    {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}, {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},
    {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}, {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E},
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}, {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},
    {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}, {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},
    {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}, {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C},
    {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}, {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F},
    {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}, {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11},
    {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}, {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10},
    {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}, {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11},
    {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}, {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},
    {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}, {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04},
    {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}, {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11},
    {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}, {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F},
}};

constexpr std::array<Rgb, 10> kCameraPalette = {{
    {220, 40, 40},  {240, 140, 30},  {235, 215, 40}, {50, 170, 70},  {40, 90, 220},
    {140, 60, 180}, {240, 130, 180}, {130, 80, 40},  {130, 130, 130}, {245, 245, 245},
}};

constexpr int kGripperTop = kGridRows * kCellPixels;
constexpr int kGripperSlotX = 224;
constexpr int kPersonSlotX = kImageSize - kCellPixels;

class Canvas {
 public:
  Canvas(int w, int h, Rgb bg) : img_{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3)} {
    fill_rect(0, 0, w, h, bg);
  }

  void put(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= img_.width || y >= img_.height) return;
    const std::size_t o = 3 * (static_cast<std::size_t>(y) * img_.width + x);
    img_.rgb[o] = c[0];
    img_.rgb[o + 1] = c[1];
    img_.rgb[o + 2] = c[2];
  }

  void fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = std::max(0, y0); y < std::min(img_.height, y1); ++y) {
      for (int x = std::max(0, x0); x < std::min(img_.width, x1); ++x) put(x, y, c);
    }
  }

  void outline_rect(int x0, int y0, int x1, int y1, int t, Rgb c) {
    fill_rect(x0, y0, x1, y0 + t, c);
    fill_rect(x0, y1 - t, x1, y1, c);
    fill_rect(x0, y0, x0 + t, y1, c);
    fill_rect(x1 - t, y0, x1, y1, c);
  }

  // Filled disc when inner_radius2 < 0, otherwise a ring.
  void disc(int x0, int y0, int x1, int y1, int thickness, Rgb c) {
    const int cx2 = x0 + x1 - 1;
    const int cy2 = y0 + y1 - 1;
    const int r2 = (x1 - x0);
    const long outer = static_cast<long>(r2) * r2;
    const int inner_r2 = thickness < 0 ? -1 : std::max(0, r2 - 2 * thickness);
    const long inner = thickness < 0 ? -1 : static_cast<long>(inner_r2) * inner_r2;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const long dx = 2L * x - cx2;
        const long dy = 2L * y - cy2;
        const long d = dx * dx + dy * dy;
        if (d <= outer && d > inner) put(x, y, c);
      }
    }
  }

  void diamond(int x0, int y0, int x1, int y1, Rgb c) {
    const int cx2 = x0 + x1 - 1;
    const int cy2 = y0 + y1 - 1;
    const int r2 = x1 - x0;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        if (std::abs(2 * x - cx2) + std::abs(2 * y - cy2) <= r2) put(x, y, c);
      }
    }
  }

  void hatch(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        if (((x - x0) + (y - y0)) % 8 == 0 || ((x - x0) - (y - y0) + 800) % 8 == 0) put(x, y, c);
      }
    }
  }

  void glyph(char g, int x0, int y0, int x1, int y1, Rgb c) {
    if (g < 'A' || g > 'Z') return;
    const int scale = std::max(1, std::min((x1 - x0) / 7, (y1 - y0) / 9));
    const int gx = x0 + ((x1 - x0) - 5 * scale) / 2;
    const int gy = y0 + ((y1 - y0) - 7 * scale) / 2;
    const auto& rows = kFont[static_cast<std::size_t>(g - 'A')];
    for (int r = 0; r < 7; ++r) {
      for (int col = 0; col < 5; ++col) {
        if ((rows[r] >> (4 - col)) & 1) {
          fill_rect(gx + col * scale, gy + r * scale, gx + (col + 1) * scale, gy + (r + 1) * scale, c);
        }
      }
    }
  }

  RgbImage take() { return std::move(img_); }

 private:
  RgbImage img_;
};

Rgb blend(Rgb a, Rgb b) {
  return {static_cast<std::uint8_t>((a[0] + b[0]) / 2), static_cast<std::uint8_t>((a[1] + b[1]) / 2),
          static_cast<std::uint8_t>((a[2] + b[2]) / 2)};
}

Rgb darken(Rgb a) {
  return {static_cast<std::uint8_t>(a[0] * 3 / 5), static_cast<std::uint8_t>(a[1] * 3 / 5),
          static_cast<std::uint8_t>(a[2] * 3 / 5)};
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  return (static_cast<std::uint32_t>(in[at]) << 24) | (static_cast<std::uint32_t>(in[at + 1]) << 16) |
         (static_cast<std::uint32_t>(in[at + 2]) << 8) | in[at + 3];
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

}  // namespace

std::array<std::uint8_t, 3> palette_rgb(Color c, RenderStyle style) {
  const Rgb base = kCameraPalette[static_cast<std::size_t>(c)];
  return style == RenderStyle::camera ? base : blend(base, Rgb{255, 255, 255});
}

std::vector<LayoutEntry> layout(const Scene& scene) {
  const ObjectTable& table = scene.table();
  const SceneState& state = scene.state();
  const auto visible = visibility_mask(table, state);
  std::vector<LayoutEntry> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!visible[i] || table.table_surface() == i) continue;
    std::size_t cur = i;
    int depth = 0;
    std::optional<std::array<int, 2>> anchor;
    for (std::size_t guard = 0; guard <= table.size(); ++guard) {
      if (state.held == cur) {
        anchor = std::array<int, 2>{kGripperSlotX, kGripperTop};
        break;
      }
      if (table.is_receiver(cur)) {
        anchor = std::array<int, 2>{kPersonSlotX, kGripperTop};
        break;
      }
      const auto s = state.support_of(cur);
      if (!s || table.table_surface() == s->parent) {
        if (table[cur].cell) {
          anchor = std::array<int, 2>{table[cur].cell->x * kCellPixels, table[cur].cell->y * kCellPixels};
        }
        break;
      }
      cur = s->parent;
      ++depth;
    }
    if (!anchor) continue;
    const int inset = std::min(4 + 7 * depth, kCellPixels / 2 - 4);
    out.push_back(LayoutEntry{table[i].id, (*anchor)[0] + inset, (*anchor)[1] + inset,
                              (*anchor)[0] + kCellPixels - inset, (*anchor)[1] + kCellPixels - inset,
                              depth});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LayoutEntry& l, const LayoutEntry& r) { return l.depth < r.depth; });
  return out;
}

RgbImage rasterize(const Scene& scene, RenderStyle style) {
  const bool sketch = style == RenderStyle::goal_sketch;
  const Rgb background = sketch ? Rgb{255, 255, 255} : Rgb{200, 170, 120};
  const Rgb strip = sketch ? Rgb{235, 235, 235} : Rgb{60, 60, 60};
  const Rgb ink{20, 20, 20};
  Canvas canvas(kImageSize, kImageSize, background);
  canvas.fill_rect(0, kGripperTop, kImageSize, kImageSize, strip);
  if (sketch) {
    for (int c = 0; c <= kGridColumns; ++c) canvas.fill_rect(c * kCellPixels, 0, c * kCellPixels + 1, kGripperTop, Rgb{225, 225, 225});
  }

  const ObjectTable& table = scene.table();
  for (const LayoutEntry& e : layout(scene)) {
    const std::size_t i = table.index_of(e.id);
    const ObjectDescriptor& d = table[i];
    const Rgb fill = palette_rgb(d.color, style);
    const Rgb edge = sketch ? ink : darken(fill);
    switch (d.category) {
      case Category::block:
        canvas.fill_rect(e.x0, e.y0, e.x1, e.y1, fill);
        canvas.outline_rect(e.x0, e.y0, e.x1, e.y1, sketch ? 2 : 1, edge);
        break;
      case Category::bowl:
        canvas.disc(e.x0, e.y0, e.x1, e.y1, sketch ? 3 : 6, fill);
        if (sketch) canvas.disc(e.x0, e.y0, e.x1, e.y1, 1, ink);
        break;
      case Category::letter:
        canvas.fill_rect(e.x0, e.y0, e.x1, e.y1, fill);
        canvas.glyph(d.glyph.value_or('A'), e.x0, e.y0, e.x1, e.y1,
                     sketch || d.color == Color::white || d.color == Color::yellow ? ink : Rgb{255, 255, 255});
        break;
      case Category::container:
        if (scene.is_open(i)) {
          canvas.outline_rect(e.x0, e.y0, e.x1, e.y1, sketch ? 2 : 4, fill);
        } else {
          canvas.fill_rect(e.x0, e.y0, e.x1, e.y1, fill);
          canvas.hatch(e.x0, e.y0, e.x1, e.y1, edge);
          canvas.outline_rect(e.x0, e.y0, e.x1, e.y1, 2, edge);
        }
        break;
      case Category::fixture:
        if (table.is_receiver(i)) {
          canvas.disc(e.x0, e.y0, e.x1, e.y1, -1, fill);
        } else {
          canvas.fill_rect(e.x0, e.y0, e.x1, e.y1, blend(fill, background));
          canvas.outline_rect(e.x0, e.y0, e.x1, e.y1, 1, edge);
        }
        break;
      case Category::misc:
        canvas.diamond(e.x0, e.y0, e.x1, e.y1, fill);
        break;
    }
  }
  return canvas.take();
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  const std::size_t row = static_cast<std::size_t>(image.width) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((row + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    const auto begin = image.rgb.begin() + static_cast<std::ptrdiff_t>(row * y);
    raw.insert(raw.end(), begin, begin + static_cast<std::ptrdiff_t>(row));
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error(ErrorKind::invariant_violation, "zlib compression failed");
  }
  packed.resize(packed_size);

  std::vector<std::uint8_t> out(kPngSignature.begin(), kPngSignature.end());
  std::vector<std::uint8_t> header;
  put_u32(header, static_cast<std::uint32_t>(image.width));
  put_u32(header, static_cast<std::uint32_t>(image.height));
  header.insert(header.end(), {8, 2, 0, 0, 0});
  put_chunk(out, "IHDR", header);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

RgbImage decode_png(const std::vector<std::uint8_t>& png) {
  if (png.size() < 8 || !std::equal(kPngSignature.begin(), kPngSignature.end(), png.begin())) {
    throw Error(ErrorKind::invariant_violation, "not a PNG");
  }
  RgbImage img;
  std::vector<std::uint8_t> packed;
  std::size_t at = 8;
  while (at + 12 <= png.size()) {
    const std::uint32_t len = get_u32(png, at);
    const std::string type(png.begin() + static_cast<std::ptrdiff_t>(at + 4),
                           png.begin() + static_cast<std::ptrdiff_t>(at + 8));
    const std::size_t data = at + 8;
    if (data + len + 4 > png.size()) throw Error(ErrorKind::invariant_violation, "truncated PNG");
    if (type == "IHDR") {
      img.width = static_cast<int>(get_u32(png, data));
      img.height = static_cast<int>(get_u32(png, data + 4));
      if (png[data + 8] != 8 || png[data + 9] != 2 || png[data + 12] != 0) {
        throw Error(ErrorKind::invariant_violation, "unsupported PNG format");
      }
    } else if (type == "IDAT") {
      packed.insert(packed.end(), png.begin() + static_cast<std::ptrdiff_t>(data),
                    png.begin() + static_cast<std::ptrdiff_t>(data + len));
    }
    at = data + len + 4;
  }
  const std::size_t row = static_cast<std::size_t>(img.width) * 3;
  std::vector<std::uint8_t> raw((row + 1) * img.height);
  uLongf raw_size = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_size, packed.data(), static_cast<uLong>(packed.size())) != Z_OK ||
      raw_size != raw.size()) {
    throw Error(ErrorKind::invariant_violation, "corrupt PNG data");
  }
  img.rgb.reserve(row * img.height);
  for (int y = 0; y < img.height; ++y) {
    const std::size_t o = y * (row + 1);
    if (raw[o] != 0) throw Error(ErrorKind::invariant_violation, "unsupported PNG filter");
    img.rgb.insert(img.rgb.end(), raw.begin() + static_cast<std::ptrdiff_t>(o + 1),
                   raw.begin() + static_cast<std::ptrdiff_t>(o + 1 + row));
  }
  return img;
}

std::vector<std::uint8_t> render_image(const Scene& scene, RenderStyle style) {
  return encode_png(rasterize(scene, style));
}

}  // namespace planbench
