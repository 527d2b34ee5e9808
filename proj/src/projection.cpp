#include "panolidar/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <thread>

#include "panolidar/error.hpp"
#include "panolidar/toml_lite.hpp"

namespace panolidar {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Winner bookkeeping for one partition: the range and source index per pixel.
struct PartialRaster {
  std::vector<double> range;
  std::vector<std::int64_t> index;
  ProjectionStats stats;
};

constexpr std::int64_t kNoPoint = -1;

double point_range(const Point3& p, RangeMode mode) {
  return mode == RangeMode::Horizontal ? horizontal_range(p) : euclidean_range(p);
}

// (range, index) lexicographic minimum: associative and commutative.
bool beats(double range, std::int64_t index, double cur_range, std::int64_t cur_index) {
  if (cur_index == kNoPoint) return true;
  if (range != cur_range) return range < cur_range;
  return index < cur_index;
}

void rasterize(std::span<const Point3> points, std::int64_t first_index, const SensorIntrinsics& intr,
               RangeMode mode, PartialRaster& out) {
  const auto pixels = static_cast<std::size_t>(intr.width) * static_cast<std::size_t>(intr.height);
  out.range.assign(pixels, PanoramaImage::kNoReturn);
  out.index.assign(pixels, kNoPoint);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.degenerate()) {
      ++out.stats.degenerate;
      continue;
    }
    const auto px = pixel_of_point(p, intr);
    if (!px) {
      ++out.stats.out_of_fov;
      continue;
    }
    ++out.stats.projected;
    const auto slot = static_cast<std::size_t>(px->v) * static_cast<std::size_t>(intr.width) +
                      static_cast<std::size_t>(px->u);
    const double r = point_range(p, mode);
    const auto idx = first_index + static_cast<std::int64_t>(i);
    if (beats(r, idx, out.range[slot], out.index[slot])) {
      out.range[slot] = r;
      out.index[slot] = idx;
    }
  }
}

void merge_into(PartialRaster& acc, const PartialRaster& other) {
  for (std::size_t s = 0; s < acc.range.size(); ++s) {
    if (other.index[s] != kNoPoint && beats(other.range[s], other.index[s], acc.range[s], acc.index[s])) {
      acc.range[s] = other.range[s];
      acc.index[s] = other.index[s];
    }
  }
  acc.stats.projected += other.stats.projected;
  acc.stats.out_of_fov += other.stats.out_of_fov;
  acc.stats.degenerate += other.stats.degenerate;
}

}  // namespace

void SensorIntrinsics::validate() const {
  if (width < 4 || width % 8 != 0) {
    throw ConfigError("intrinsics: width must be >= 4 and divisible by 8, got " + std::to_string(width));
  }
  if (height < 1) throw ConfigError("intrinsics: height must be >= 1");
  if (!(elevation_max_deg > elevation_min_deg)) {
    throw ConfigError("intrinsics: elevation_max_deg must exceed elevation_min_deg");
  }
  if (elevation_max_deg > 90.0 || elevation_min_deg < -90.0) {
    throw ConfigError("intrinsics: elevation bounds must lie within [-90, 90]");
  }
  if (!(range_quantum_m > 0.0) || !std::isfinite(range_quantum_m)) {
    throw ConfigError("intrinsics: range_quantum_m must be positive");
  }
}

SensorIntrinsics load_intrinsics(const std::filesystem::path& path) {
  const auto doc = load_toml(path);
  SensorIntrinsics intr;
  try {
    if (doc.contains("width")) intr.width = doc.at("width").get<int>();
    if (doc.contains("height")) intr.height = doc.at("height").get<int>();
    if (doc.contains("elevation_max_deg")) intr.elevation_max_deg = doc.at("elevation_max_deg").get<double>();
    if (doc.contains("elevation_min_deg")) intr.elevation_min_deg = doc.at("elevation_min_deg").get<double>();
    if (doc.contains("range_quantum_m")) intr.range_quantum_m = doc.at("range_quantum_m").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  intr.validate();
  return intr;
}

void save_intrinsics(const SensorIntrinsics& intr, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "width = " << intr.width << "\n"
      << "height = " << intr.height << "\n"
      << "elevation_max_deg = " << intr.elevation_max_deg << "\n"
      << "elevation_min_deg = " << intr.elevation_min_deg << "\n"
      << "range_quantum_m = " << intr.range_quantum_m << "\n";
}

PanoramaImage PanoramaImage::blank(const SensorIntrinsics& intr) {
  PanoramaImage pano;
  pano.intrinsics = intr;
  pano.range = Raster<double>(intr.width, intr.height, kNoReturn);
  return pano;
}

double azimuth_of_point(const Point3& p) {
  if (p.degenerate()) throw DegeneratePoint("azimuth undefined for x = y = 0");
  double theta = -std::atan2(p.y, p.x) * kRadToDeg;
  // atan2(-0, -x) = -pi lands on +180; fold it onto the left edge.
  if (theta >= 180.0) theta -= 360.0;
  if (theta < -180.0) theta += 360.0;
  return theta;
}

double elevation_of_point(const Point3& p) { return std::atan2(p.z, horizontal_range(p)) * kRadToDeg; }

int column_of_azimuth(double theta_deg, const SensorIntrinsics& intr) {
  const double w = intr.width;
  auto u = static_cast<long long>(std::floor(w * theta_deg / 360.0 + w / 2.0));
  u %= intr.width;
  if (u < 0) u += intr.width;
  return static_cast<int>(u);
}

double azimuth_of_column(int u, const SensorIntrinsics& intr) {
  return 360.0 * (static_cast<double>(u) - intr.width / 2.0) / intr.width;
}

std::optional<int> row_of_elevation(double phi_deg, const SensorIntrinsics& intr) {
  if (!(phi_deg >= intr.elevation_min_deg && phi_deg <= intr.elevation_max_deg)) return std::nullopt;
  const double span = intr.elevation_max_deg - intr.elevation_min_deg;
  const auto v = static_cast<int>(std::floor((intr.elevation_max_deg - phi_deg) / span * intr.height));
  return std::clamp(v, 0, intr.height - 1);
}

double elevation_of_row(int v, const SensorIntrinsics& intr) {
  return intr.elevation_max_deg - static_cast<double>(v) * intr.row_height_deg();
}

std::optional<PixelCoord> pixel_of_point(const Point3& p, const SensorIntrinsics& intr) {
  if (p.degenerate()) return std::nullopt;
  const auto row = row_of_elevation(elevation_of_point(p), intr);
  if (!row) return std::nullopt;
  return PixelCoord{column_of_azimuth(azimuth_of_point(p), intr), *row};
}

ProjectionResult project_cloud(const PointCloud& cloud, const SensorIntrinsics& intr,
                               const ProjectionOptions& options) {
  intr.validate();
  const std::span<const Point3> points = cloud.points;
  const auto workers = static_cast<std::size_t>(
      std::max<unsigned>(1, std::min<unsigned>(options.workers, static_cast<unsigned>(std::max<std::size_t>(1, points.size())))));

  std::vector<PartialRaster> partials(workers);
  const auto chunk = (points.size() + workers - 1) / workers;
  auto run = [&](std::size_t w) {
    const auto begin = std::min(points.size(), w * chunk);
    const auto end = std::min(points.size(), begin + chunk);
    rasterize(points.subspan(begin, end - begin), static_cast<std::int64_t>(begin), intr, options.range_mode,
              partials[w]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
  }
  for (std::size_t w = 1; w < workers; ++w) merge_into(partials[0], partials[w]);
  const auto& winner = partials[0];

  ProjectionResult result{PanoramaImage::blank(intr), winner.stats};
  auto& pano = result.panorama;
  const auto has = [&](auto member) {
    return std::any_of(points.begin(), points.end(), [&](const Point3& p) { return (p.*member).has_value(); });
  };
  if (has(&Point3::ambient)) pano.ambient.emplace(intr.width, intr.height, 0);
  if (has(&Point3::signal)) pano.signal.emplace(intr.width, intr.height, 0);
  if (has(&Point3::reflectivity)) pano.reflectivity.emplace(intr.width, intr.height, 0);

  auto range_px = pano.range.pixels();
  for (std::size_t s = 0; s < winner.index.size(); ++s) {
    if (winner.index[s] == kNoPoint) continue;
    range_px[s] = winner.range[s];
    const auto& p = points[static_cast<std::size_t>(winner.index[s])];
    if (pano.ambient) pano.ambient->pixels()[s] = p.ambient.value_or(0);
    if (pano.signal) pano.signal->pixels()[s] = p.signal.value_or(0);
    if (pano.reflectivity) pano.reflectivity->pixels()[s] = p.reflectivity.value_or(0);
  }
  return result;
}

}  // namespace panolidar
