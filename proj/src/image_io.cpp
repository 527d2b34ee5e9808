#include "panolidar/image_io.hpp"

#include <png.h>
#include <openssl/evp.h>

#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include "panolidar/error.hpp"

namespace panolidar {

namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(out, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t length) {
  auto* sink = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  sink->insert(sink->end(), data, data + length);
}

void flush_noop(png_structp) {}

// libpng reports errors by longjmp; keep C++ objects with destructors out of the
// frames between setjmp and the libpng calls.
bool encode_rows(const GrayImage& image, std::vector<std::uint8_t>& sink, std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &sink, write_to_memory, flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.pixels.width()),
               static_cast<png_uint_32>(image.pixels.height()), image.bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct DecodedHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

bool decode_rows(ReadCursor& cursor, DecodedHeader& header, std::vector<std::uint8_t>& buffer) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_info(png, info);
  header.width = png_get_image_width(png, info);
  header.height = png_get_image_height(png, info);
  header.bit_depth = png_get_bit_depth(png, info);
  header.color_type = png_get_color_type(png, info);
  if (header.color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    return true;  // caller rejects the color type
  }
  if (header.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  const auto rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * header.height);
  for (png_uint_32 y = 0; y < header.height; ++y) {
    png_read_row(png, buffer.data() + y * rowbytes, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw FileNotFound("no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  if (image.bit_depth != 8 && image.bit_depth != 16) throw Error("PNG bit depth must be 8 or 16");
  const auto w = static_cast<std::size_t>(image.pixels.width());
  const auto h = static_cast<std::size_t>(image.pixels.height());
  const std::size_t bytes_per_sample = image.bit_depth == 16 ? 2 : 1;
  std::vector<std::uint8_t> raw(w * h * bytes_per_sample);
  const auto px = image.pixels.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (bytes_per_sample == 2) {
      raw[2 * i] = static_cast<std::uint8_t>(px[i] >> 8);
      raw[2 * i + 1] = static_cast<std::uint8_t>(px[i] & 0xff);
    } else {
      raw[i] = static_cast<std::uint8_t>(std::min<std::uint16_t>(px[i], 255));
    }
  }
  std::vector<png_bytep> rows(h);
  for (std::size_t y = 0; y < h; ++y) rows[y] = raw.data() + y * w * bytes_per_sample;
  std::vector<std::uint8_t> sink;
  if (!encode_rows(image, sink, rows)) throw IoError("PNG encoding failed");
  return sink;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatMismatch("not a PNG file");
  ReadCursor cursor{bytes, 0};
  DecodedHeader header;
  std::vector<std::uint8_t> buffer;
  if (!decode_rows(cursor, header, buffer)) throw FormatMismatch("corrupt PNG data");
  if (header.color_type != PNG_COLOR_TYPE_GRAY) throw FormatMismatch("PNG is not single-channel grayscale");

  GrayImage image;
  image.bit_depth = header.bit_depth == 16 ? 16 : 8;
  image.pixels = Raster<std::uint16_t>(static_cast<int>(header.width), static_cast<int>(header.height));
  auto px = image.pixels.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = image.bit_depth == 16 ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1])
                                  : buffer[i];
  }
  return image;
}

void write_png(const GrayImage& image, const std::filesystem::path& path) { write_bytes(encode_png(image), path); }

GrayImage read_png(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_png(bytes);
  } catch (const FormatMismatch& e) {
    throw FormatMismatch(path.string() + ": " + e.what());
  }
}

GrayImage encode_range(const Raster<double>& range, double quantum_m) {
  GrayImage image{Raster<std::uint16_t>(range.width(), range.height()), 16};
  auto out = image.pixels.pixels();
  const auto in = range.pixels();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double counts = std::round(in[i] / quantum_m);
    out[i] = counts >= 65535.0 ? std::uint16_t{65535} : static_cast<std::uint16_t>(std::max(0.0, counts));
  }
  return image;
}

Raster<double> decode_range(const GrayImage& image, double quantum_m) {
  Raster<double> range(image.pixels.width(), image.pixels.height());
  auto out = range.pixels();
  const auto in = image.pixels.pixels();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * quantum_m;
  return range;
}

std::vector<std::filesystem::path> write_panorama(const PanoramaImage& pano, const std::filesystem::path& dir,
                                                  std::string_view stem) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const GrayImage& img, std::string_view channel) {
    auto path = dir / (std::string(stem) + "_" + std::string(channel) + ".png");
    write_png(img, path);
    written.push_back(std::move(path));
  };
  emit(encode_range(pano.range, pano.intrinsics.range_quantum_m), "range");
  if (pano.ambient) emit(GrayImage{*pano.ambient, 16}, "ambient");
  if (pano.signal) emit(GrayImage{*pano.signal, 16}, "signal");
  if (pano.reflectivity) emit(GrayImage{*pano.reflectivity, 16}, "reflectivity");
  return written;
}

PanoramaImage read_panorama(const std::filesystem::path& range_png, const SensorIntrinsics& intr,
                            const std::filesystem::path& ambient_png) {
  intr.validate();
  const auto check = [&](const GrayImage& img, const std::filesystem::path& path) {
    if (img.pixels.width() != intr.width || img.pixels.height() != intr.height) {
      throw DimensionMismatch(path.string() + " is " + std::to_string(img.pixels.width()) + "x" +
                              std::to_string(img.pixels.height()) + ", intrinsics expect " +
                              std::to_string(intr.width) + "x" + std::to_string(intr.height));
    }
  };
  const auto range_img = read_png(range_png);
  check(range_img, range_png);
  PanoramaImage pano;
  pano.intrinsics = intr;
  pano.range = decode_range(range_img, intr.range_quantum_m);
  if (!ambient_png.empty()) {
    auto amb = read_png(ambient_png);
    check(amb, ambient_png);
    pano.ambient = std::move(amb.pixels);
  }
  return pano;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatMismatch("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw FormatMismatch("invalid base64");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace panolidar
