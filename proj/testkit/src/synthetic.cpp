#include "panolidar/testkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "panolidar/toml_lite.hpp"

namespace panolidar::testkit {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double step(double v, int ulps) {
  const double toward = ulps > 0 ? INFINITY : -INFINITY;
  for (int i = 0; i < std::abs(ulps); ++i) v = std::nextafter(v, toward);
  return v;
}

double wrap_azimuth(double theta) {
  while (theta >= 180.0) theta -= 360.0;
  while (theta < -180.0) theta += 360.0;
  return theta;
}

}  // namespace

Point3 point_at(double range_m, double azimuth_deg, double elevation_deg) {
  const double z = range_m * std::tan(elevation_deg * kDegToRad);
  // x*x + y*y lives on a grid a few ulps coarse, so some ranges are unreachable
  // from a given (x0, y0). Search nearby components first, then retry from
  // azimuths perturbed by multiples of 1e-10 degrees.
  Point3 best;
  double best_err = INFINITY;
  for (int t = 0; t < 64 && best_err > 0.0; ++t) {
    const double az = azimuth_deg + ((t + 1) / 2) * (t % 2 ? 1e-10 : -1e-10);
    // azimuth = -atan2(y, x)
    const double x0 = range_m * std::cos(az * kDegToRad);
    const double y0 = -range_m * std::sin(az * kDegToRad);
    const bool x_major = std::abs(x0) >= std::abs(y0);
    const double major0 = x_major ? x0 : y0;
    const double minor0 = x_major ? y0 : x0;
    const double sum = x0 * x0 + y0 * y0;
    const double sum_ulp = std::nextafter(sum, INFINITY) - sum;
    const double minor_ulp = std::nextafter(std::abs(minor0), INFINITY) - std::abs(minor0);
    const double minor_step = minor0 != 0.0 ? std::max(sum_ulp / (8.0 * std::abs(minor0)), minor_ulp) : 0.0;
    for (int dm = 0; dm <= 2 && best_err > 0.0; ++dm) {
      for (const int sign : {1, -1}) {
        const double major = step(major0, sign * dm);
        for (int k = -4; k <= 4 && best_err > 0.0; ++k) {
          const double minor = minor0 + k * minor_step;
          const Point3 p{x_major ? major : minor, x_major ? minor : major, z, {}, {}, {}};
          const double err = std::abs(horizontal_range(p) - range_m);
          if (err < best_err) {
            best = p;
            best_err = err;
          }
        }
      }
    }
  }
  return best;
}

PointCloud generate_cloud(const SyntheticScene& scene, const SensorIntrinsics& intr) {
  PointCloud cloud;
  cloud.source = "synthetic(seed=" + std::to_string(scene.seed) + ")";
  std::mt19937_64 rng(scene.seed);
  for (const auto& pl : scene.placements) {
    if (!(pl.range_m > 0.0)) throw PlacementOutOfFov("placement '" + pl.label + "': range must be positive");
    if (pl.azimuth_deg < -180.0 || pl.azimuth_deg >= 180.0) {
      throw PlacementOutOfFov("placement '" + pl.label + "': azimuth outside [-180, 180)");
    }
    if (pl.elevation_deg - pl.jitter_deg < intr.elevation_min_deg ||
        pl.elevation_deg + pl.jitter_deg > intr.elevation_max_deg) {
      throw PlacementOutOfFov("placement '" + pl.label + "': elevation outside the vertical field of view");
    }
    if (pl.points < 1) throw PlacementOutOfFov("placement '" + pl.label + "': needs at least one point");
    std::uniform_real_distribution<double> jitter(-pl.jitter_deg, pl.jitter_deg);
    for (int i = 0; i < pl.points; ++i) {
      double az = pl.azimuth_deg;
      double el = pl.elevation_deg;
      if (i > 0 && pl.jitter_deg > 0.0) {
        az = wrap_azimuth(az + jitter(rng));
        el += jitter(rng);
      }
      auto p = point_at(pl.range_m, az, el);
      if (pl.ambient > 0) {
        p.ambient = pl.ambient;
        p.signal = pl.ambient;
        p.reflectivity = pl.ambient;
      }
      cloud.points.push_back(p);
    }
  }
  cloud.summary.records = cloud.points.size();
  return cloud;
}

SyntheticScene scene_from_toml(const nlohmann::json& doc) {
  SyntheticScene scene;
  try {
    scene.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("placement")) {
      for (const auto& t : doc.at("placement")) {
        Placement p;
        p.label = t.value("label", std::string{});
        p.range_m = t.at("range").get<double>();
        p.azimuth_deg = t.at("azimuth").get<double>();
        p.elevation_deg = t.value("elevation", 0.0);
        p.points = t.value("points", 1);
        p.jitter_deg = t.value("jitter", 0.0);
        p.ambient = t.value("ambient", std::uint16_t{0});
        scene.placements.push_back(std::move(p));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  return scene;
}

SyntheticScene load_scene(const std::filesystem::path& path) { return scene_from_toml(load_toml(path)); }

}  // namespace panolidar::testkit
