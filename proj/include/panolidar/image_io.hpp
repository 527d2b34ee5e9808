#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "panolidar/projection.hpp"

namespace panolidar {

/// Single-channel grayscale image as stored on disk. 8-bit files are held
/// unscaled in 16-bit samples and written back at their original depth.
struct GrayImage {
  Raster<std::uint16_t> pixels;
  int bit_depth = 16;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

std::vector<std::uint8_t> encode_png(const GrayImage& image);
GrayImage decode_png(std::span<const std::uint8_t> bytes);

void write_png(const GrayImage& image, const std::filesystem::path& path);
/// Throws FileNotFound, or FormatMismatch for non-grayscale / non-PNG input.
GrayImage read_png(const std::filesystem::path& path);

/// round(range / quantum), clipped to 65535; the 0.0 sentinel stays 0.
GrayImage encode_range(const Raster<double>& range, double quantum_m);
Raster<double> decode_range(const GrayImage& image, double quantum_m);

/// Files written for a panorama: `{stem}_range.png` plus one file per present channel.
std::vector<std::filesystem::path> write_panorama(const PanoramaImage& pano, const std::filesystem::path& dir,
                                                  std::string_view stem);

/// Rebuilds a panorama from a range PNG (and optional ambient PNG). Image size
/// must match the intrinsics; throws DimensionMismatch otherwise.
PanoramaImage read_panorama(const std::filesystem::path& range_png, const SensorIntrinsics& intr,
                            const std::filesystem::path& ambient_png = {});

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace panolidar
