#include "panolidar/annotate.hpp"

#include <array>
#include <string>

#include "panolidar/error.hpp"

namespace panolidar {

namespace {

constexpr int kGlyphW = 3;
constexpr int kGlyphH = 5;

using Glyph = std::array<const char*, kGlyphH>;

// 3x5 bitmap font covering the characters annotations use.
const Glyph* glyph(char32_t c) {
  static const Glyph digits[10] = {
      {"###", "#.#", "#.#", "#.#", "###"}, {".#.", "##.", ".#.", ".#.", "###"}, {"###", "..#", "###", "#..", "###"},
      {"###", "..#", "###", "..#", "###"}, {"#.#", "#.#", "###", "..#", "..#"}, {"###", "#..", "###", "..#", "###"},
      {"###", "#..", "###", "#.#", "###"}, {"###", "..#", ".#.", ".#.", ".#."}, {"###", "#.#", "###", "#.#", "###"},
      {"###", "#.#", "###", "..#", "###"}};
  static const Glyph lparen{".#.", "#..", "#..", "#..", ".#."};
  static const Glyph rparen{".#.", "..#", "..#", "..#", ".#."};
  static const Glyph lbracket{"##.", "#..", "#..", "#..", "##."};
  static const Glyph rbracket{".##", "..#", "..#", "..#", ".##"};
  static const Glyph m{"...", "##.", "###", "#.#", "#.#"};
  static const Glyph comma{"...", "...", "...", ".#.", "#.."};
  static const Glyph dash{"...", "...", "###", "...", "..."};
  static const Glyph dot{"...", "...", "...", "...", ".#."};
  static const Glyph degree{"##.", "##.", "...", "...", "..."};
  static const Glyph blank{"...", "...", "...", "...", "..."};
  if (c >= U'0' && c <= U'9') return &digits[c - U'0'];
  switch (c) {
    case U'(': return &lparen;
    case U')': return &rparen;
    case U'[': return &lbracket;
    case U']': return &rbracket;
    case U'm': return &m;
    case U',': return &comma;
    case U'-':
    case U'–': return &dash;
    case U'.': return &dot;
    case U'°': return &degree;
    default: return &blank;
  }
}

std::u32string decode_utf8(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      out.push_back(c);
      i += 1;
    } else if ((c & 0xE0) == 0xC0 && i + 1 < s.size()) {
      out.push_back(static_cast<char32_t>(((c & 0x1F) << 6) | (s[i + 1] & 0x3F)));
      i += 2;
    } else if ((c & 0xF0) == 0xE0 && i + 2 < s.size()) {
      out.push_back(static_cast<char32_t>(((c & 0x0F) << 12) | ((s[i + 1] & 0x3F) << 6) | (s[i + 2] & 0x3F)));
      i += 3;
    } else {
      out.push_back(U'?');
      i += 1;
    }
  }
  return out;
}

class SegmentCanvas {
 public:
  SegmentCanvas(Raster<std::uint16_t>& image, SegmentLabel label, std::uint16_t ink)
      : image_(image), start_(segment_start(label, image.width())), ink_(ink) {}

  void plot(int u_seg, int v) {
    if (u_seg < 0 || u_seg >= image_.width() / 4 || v < 0 || v >= image_.height()) return;
    image_((start_ + u_seg) % image_.width(), v) = ink_;
  }

  void outline(const BBox& b) {
    for (int u = b.u0; u < b.u1; ++u) {
      plot(u, b.v0);
      plot(u, b.v1 - 1);
    }
    for (int v = b.v0; v < b.v1; ++v) {
      plot(b.u0, v);
      plot(b.u1 - 1, v);
    }
  }

  void text(const BBox& b, const std::string& utf8) {
    int x = b.u0 + 2;
    const int y = b.v0 + 2;
    for (const char32_t c : decode_utf8(utf8)) {
      const auto* g = glyph(c);
      for (int gy = 0; gy < kGlyphH; ++gy) {
        for (int gx = 0; gx < kGlyphW; ++gx) {
          const int u = x + gx;
          const int v = y + gy;
          if ((*g)[gy][gx] != '#') continue;
          if (u <= b.u0 || u >= b.u1 - 1 || v <= b.v0 || v >= b.v1 - 1) continue;
          plot(u, v);
        }
      }
      x += kGlyphW + 1;
    }
  }

 private:
  Raster<std::uint16_t>& image_;
  int start_;
  std::uint16_t ink_;
};

}  // namespace

GrayImage annotate_panorama(const GrayImage& panorama, const SceneDescription& scene) {
  if (panorama.pixels.width() != scene.width || panorama.pixels.height() != scene.height) {
    throw DimensionMismatch("panorama is " + std::to_string(panorama.pixels.width()) + "x" +
                            std::to_string(panorama.pixels.height()) + " but the scene refers to " +
                            std::to_string(scene.width) + "x" + std::to_string(scene.height));
  }
  if (scene.width % 8 != 0) throw BadWidth("panorama width must be divisible by 8");
  GrayImage out = panorama;
  const auto ink = static_cast<std::uint16_t>(out.bit_depth == 16 ? 65535 : 255);
  for (const auto& [label, seg] : scene.per_segment) {
    SegmentCanvas canvas(out.pixels, label, ink);
    for (const auto& obj : seg.objects) {
      if (!obj.bbox_segment.valid()) continue;
      canvas.outline(obj.bbox_segment);
      canvas.text(obj.bbox_segment, format_annotation(obj));
    }
  }
  return out;
}

}  // namespace panolidar
