#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace panolidar {

/// One LiDAR return in the sensor frame: +x forward, +y left, +z up (meters).
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::optional<std::uint16_t> ambient;
  std::optional<std::uint16_t> signal;
  std::optional<std::uint16_t> reflectivity;

  /// x = y = 0 has no defined azimuth and cannot be projected.
  bool degenerate() const { return x == 0.0 && y == 0.0; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

enum class CloudFormat { Csv, PcdAscii, RawF32 };

std::string_view to_string(CloudFormat format);
std::optional<CloudFormat> parse_cloud_format(std::string_view name);
/// Guess from the file extension: .csv, .pcd, .bin/.f32/.raw.
std::optional<CloudFormat> cloud_format_from_extension(const std::filesystem::path& path);

struct ParseSummary {
  std::size_t records = 0;     // points accepted
  std::size_t malformed = 0;   // rows skipped (bad arity, non-numeric, non-finite)
  std::size_t degenerate = 0;  // accepted points with x = y = 0
};

struct PointCloud {
  std::vector<Point3> points;
  std::string source;
  ParseSummary summary;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

/// Reads a cloud from disk. Malformed records are skipped and counted, never fatal.
/// Throws FileNotFound, or FormatMismatch when the file cannot be the declared format.
PointCloud parse_cloud(const std::filesystem::path& path, CloudFormat format);

PointCloud parse_csv(std::string_view text, std::string source = "<memory>");
PointCloud parse_pcd_ascii(std::string_view text, std::string source = "<memory>");
PointCloud parse_raw_f32(std::string_view bytes, std::string source = "<memory>");

/// CSV in the canonical x,y,z[,ambient,signal,reflectivity] column order.
/// Channel columns are written only when every point carries all three.
std::string to_csv(const PointCloud& cloud);
void write_csv(const PointCloud& cloud, const std::filesystem::path& path);

/// sqrt(x^2 + y^2). Height is excluded on purpose; this is the range stored in the distance image.
double horizontal_range(const Point3& p);

/// Full 3D Euclidean range. Opt-in alternative to horizontal_range.
double euclidean_range(const Point3& p);

}  // namespace panolidar
