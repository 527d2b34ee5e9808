#include "panolidar/testkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace panolidar::testkit {

PanoramaImage oracle_project(const PointCloud& cloud, const SensorIntrinsics& intr) {
  const double rad_to_deg = 180.0 / std::numbers::pi;
  const double w = intr.width;
  const double span = intr.elevation_max_deg - intr.elevation_min_deg;

  std::map<std::pair<int, int>, std::vector<std::size_t>> hits;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    if (p.x == 0.0 && p.y == 0.0) continue;
    const double hr = std::sqrt(p.x * p.x + p.y * p.y);
    const double phi = std::atan2(p.z, hr) * rad_to_deg;
    if (!(phi >= intr.elevation_min_deg && phi <= intr.elevation_max_deg)) continue;
    int v = static_cast<int>(std::floor((intr.elevation_max_deg - phi) / span * intr.height));
    v = std::min(std::max(v, 0), intr.height - 1);
    double theta = -std::atan2(p.y, p.x) * rad_to_deg;
    if (theta >= 180.0) theta -= 360.0;
    if (theta < -180.0) theta += 360.0;
    auto u = static_cast<long long>(std::floor(w * theta / 360.0 + w / 2.0)) % intr.width;
    if (u < 0) u += intr.width;
    hits[{static_cast<int>(u), v}].push_back(i);
  }

  auto pano = PanoramaImage::blank(intr);
  const auto any = [&](auto member) {
    return std::any_of(cloud.points.begin(), cloud.points.end(), [&](const Point3& p) { return (p.*member).has_value(); });
  };
  if (any(&Point3::ambient)) pano.ambient.emplace(intr.width, intr.height, 0);
  if (any(&Point3::signal)) pano.signal.emplace(intr.width, intr.height, 0);
  if (any(&Point3::reflectivity)) pano.reflectivity.emplace(intr.width, intr.height, 0);

  for (const auto& [pixel, indices] : hits) {
    const auto winner = *std::min_element(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      const auto& pa = cloud.points[a];
      const auto& pb = cloud.points[b];
      return std::make_tuple(std::sqrt(pa.x * pa.x + pa.y * pa.y), a) <
             std::make_tuple(std::sqrt(pb.x * pb.x + pb.y * pb.y), b);
    });
    const auto& p = cloud.points[winner];
    const auto [u, v] = pixel;
    pano.range(u, v) = std::sqrt(p.x * p.x + p.y * p.y);
    if (pano.ambient) (*pano.ambient)(u, v) = p.ambient.value_or(0);
    if (pano.signal) (*pano.signal)(u, v) = p.signal.value_or(0);
    if (pano.reflectivity) (*pano.reflectivity)(u, v) = p.reflectivity.value_or(0);
  }
  return pano;
}

std::optional<double> oracle_object_range(const PanoramaImage& pano, SegmentLabel segment, const BBox& bbox) {
  const int cu = (bbox.u0 + bbox.u1) / 2;
  const int cv = (bbox.v0 + bbox.v1) / 2;
  const int start = segment_start(segment, pano.width());
  std::vector<std::pair<int, double>> cells;
  for (int v = bbox.v0; v < bbox.v1; ++v) {
    for (int u = bbox.u0; u < bbox.u1; ++u) {
      const int cheb = std::max(std::abs(u - cu), std::abs(v - cv));
      cells.emplace_back(cheb, pano.range((start + u) % pano.width(), v));
    }
  }
  std::sort(cells.begin(), cells.end());
  for (const auto& [cheb, value] : cells) {
    if (value > 0.0) return value;
  }
  return std::nullopt;
}

}  // namespace panolidar::testkit
