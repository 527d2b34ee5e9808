#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "panolidar/pointcloud.hpp"

namespace panolidar {

/// Panorama geometry. Columns cover azimuth [-180, 180), rows cover elevation
/// [elevation_min, elevation_max] top to bottom.
struct SensorIntrinsics {
  int width = 2048;
  int height = 128;
  double elevation_max_deg = 22.5;
  double elevation_min_deg = -22.5;
  double range_quantum_m = 1.0 / 256.0;

  /// Ouster OS1-128 image size. The elevation bounds are the datasheet's +/-22.5 deg.
  static SensorIntrinsics os1_128() { return {}; }

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  double column_width_deg() const { return 360.0 / width; }
  double row_height_deg() const { return (elevation_max_deg - elevation_min_deg) / height; }

  friend bool operator==(const SensorIntrinsics&, const SensorIntrinsics&) = default;
};

/// Reads width, height, elevation_max_deg, elevation_min_deg, range_quantum_m.
/// Missing keys keep the os1-128 defaults.
SensorIntrinsics load_intrinsics(const std::filesystem::path& path);
void save_intrinsics(const SensorIntrinsics& intr, const std::filesystem::path& path);

struct PixelCoord {
  int u = 0;  // column
  int v = 0;  // row
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Row-major W x H grid.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  T& at(int u, int v) { return data_[index(u, v)]; }
  const T& at(int u, int v) const { return data_[index(u, v)]; }
  T& operator()(int u, int v) { return at(u, v); }
  const T& operator()(int u, int v) const { return at(u, v); }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  bool contains(int u, int v) const { return u >= 0 && u < width_ && v >= 0 && v < height_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Multi-channel panoramic image. Range is in meters with 0.0 meaning "no return".
struct PanoramaImage {
  SensorIntrinsics intrinsics;
  Raster<double> range;
  std::optional<Raster<std::uint16_t>> ambient;
  std::optional<Raster<std::uint16_t>> signal;
  std::optional<Raster<std::uint16_t>> reflectivity;

  static constexpr double kNoReturn = 0.0;

  /// All-sentinel panorama with no optional channels.
  static PanoramaImage blank(const SensorIntrinsics& intr);

  int width() const { return range.width(); }
  int height() const { return range.height(); }

  friend bool operator==(const PanoramaImage&, const PanoramaImage&) = default;
};

/// Horizontal angle of a return: 0 straight ahead, negative toward +y (left),
/// in [-180, 180). Throws DegeneratePoint for x = y = 0.
double azimuth_of_point(const Point3& p);

/// Elevation above the horizontal plane, atan2(z, horizontal range), degrees.
double elevation_of_point(const Point3& p);

/// floor(W * theta / 360 + W / 2), wrapped into [0, W).
int column_of_azimuth(double theta_deg, const SensorIntrinsics& intr);

/// 360 * (u - W/2) / W
double azimuth_of_column(int u, const SensorIntrinsics& intr);

/// Uniform elevation grid, top row = elevation_max. nullopt outside the vertical FOV.
std::optional<int> row_of_elevation(double phi_deg, const SensorIntrinsics& intr);

/// Elevation of the top edge of row v (inverse of row_of_elevation up to one row).
double elevation_of_row(int v, const SensorIntrinsics& intr);

enum class RangeMode {
  Horizontal,  // sqrt(x^2 + y^2), the default
  Euclidean,   // full 3D range; not what the distance image formula specifies
};

struct ProjectionStats {
  std::size_t projected = 0;
  std::size_t out_of_fov = 0;
  std::size_t degenerate = 0;
  friend bool operator==(const ProjectionStats&, const ProjectionStats&) = default;
};

struct ProjectionOptions {
  RangeMode range_mode = RangeMode::Horizontal;
  /// Number of worker partitions. Results are identical for any value >= 1.
  unsigned workers = 1;
};

struct ProjectionResult {
  PanoramaImage panorama;
  ProjectionStats stats;
};

/// Pixel a point lands on, or nullopt when degenerate or outside the vertical FOV.
std::optional<PixelCoord> pixel_of_point(const Point3& p, const SensorIntrinsics& intr);

/// Rasterizes a cloud. Each pixel keeps its nearest point (lowest index on equal
/// range); optional channels come from that same point.
ProjectionResult project_cloud(const PointCloud& cloud, const SensorIntrinsics& intr,
                               const ProjectionOptions& options = {});

}  // namespace panolidar
