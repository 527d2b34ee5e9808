#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "panolidar/error.hpp"
#include "panolidar/pointcloud.hpp"
#include "panolidar/projection.hpp"

namespace panolidar::testkit {

/// A cluster of returns at a known horizontal range and bearing.
struct Placement {
  std::string label;
  double range_m = 1.0;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  int points = 1;
  double jitter_deg = 0.0;  // uniform +/- offset in azimuth and elevation
  std::uint16_t ambient = 0;  // optional channel value written on every point; 0 leaves it absent
};

struct SyntheticScene {
  std::vector<Placement> placements;
  std::uint64_t seed = 0;
};

class PlacementOutOfFov : public Error {
 public:
  using Error::Error;
};

/// Point at (horizontal range, azimuth, elevation). x and y are nudged (azimuth moves
/// by at most ~3e-9 degrees) so that horizontal_range() returns exactly `range_m`.
Point3 point_at(double range_m, double azimuth_deg, double elevation_deg);

/// Deterministic for a fixed seed. The first point of each placement sits exactly at
/// the placement bearing; the rest are jittered tangentially, so every point keeps the
/// placement's horizontal range. Throws PlacementOutOfFov.
PointCloud generate_cloud(const SyntheticScene& scene, const SensorIntrinsics& intr);

/// `seed = N` plus `[[placement]]` tables with label, range, azimuth, elevation, points, jitter, ambient.
SyntheticScene scene_from_toml(const nlohmann::json& doc);
SyntheticScene load_scene(const std::filesystem::path& path);

}  // namespace panolidar::testkit
