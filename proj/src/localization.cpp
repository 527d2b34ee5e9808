#include "panolidar/localization.hpp"

#include <algorithm>
#include <limits>

#include "panolidar/error.hpp"

namespace panolidar {

std::string_view to_string(RangeSource source) {
  switch (source) {
    case RangeSource::CenterPixel: return "center_pixel";
    case RangeSource::NearestValidInBBox: return "nearest_valid_in_bbox";
    case RangeSource::Unavailable: return "unavailable";
  }
  return "unavailable";
}

std::optional<RangeSource> parse_range_source(std::string_view name) {
  for (auto s : {RangeSource::CenterPixel, RangeSource::NearestValidInBBox, RangeSource::Unavailable}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

PixelCoord bbox_center(const BBox& bbox) {
  // Boxes are non-negative after clipping, so integer division is floor.
  return {(bbox.u0 + bbox.u1) / 2, (bbox.v0 + bbox.v1) / 2};
}

double object_azimuth(PixelCoord center_panorama, const SensorIntrinsics& intr) {
  return azimuth_of_column(center_panorama.u, intr);
}

RangeEstimate object_range(const PanoramaImage& pano, SegmentLabel segment, const BBox& bbox) {
  const auto& intr = pano.intrinsics;
  if (!bbox.valid()) throw OutOfBounds("object_range: empty bounding box");
  const auto center = bbox_center(bbox);
  auto range_at = [&](int u_seg, int v) {
    const auto p = to_panorama_coords(segment, {u_seg, v}, intr);
    return pano.range(p.u, p.v);
  };

  const double at_center = range_at(center.u, center.v);
  if (at_center > 0.0) return {at_center, RangeSource::CenterPixel};

  const int max_ring = std::max({center.u - bbox.u0, bbox.u1 - 1 - center.u, center.v - bbox.v0, bbox.v1 - 1 - center.v});
  for (int ring = 1; ring <= max_ring; ++ring) {
    double best = std::numeric_limits<double>::infinity();
    const int u_lo = std::max(bbox.u0, center.u - ring);
    const int u_hi = std::min(bbox.u1 - 1, center.u + ring);
    const int v_lo = std::max(bbox.v0, center.v - ring);
    const int v_hi = std::min(bbox.v1 - 1, center.v + ring);
    for (int v = v_lo; v <= v_hi; ++v) {
      const bool edge_row = v == center.v - ring || v == center.v + ring;
      for (int u = u_lo; u <= u_hi; ++u) {
        if (!edge_row && u != center.u - ring && u != center.u + ring) continue;
        const double r = range_at(u, v);
        if (r > 0.0 && r < best) best = r;
      }
    }
    if (best < std::numeric_limits<double>::infinity()) return {best, RangeSource::NearestValidInBBox};
  }
  return {std::nullopt, RangeSource::Unavailable};
}

std::vector<LocalizedObject> localize(const SegmentAnalysis& analysis, const PanoramaImage& pano) {
  std::vector<LocalizedObject> objects;
  objects.reserve(analysis.detections.size());
  for (const auto& det : analysis.detections) {
    LocalizedObject obj;
    obj.label = det.label;
    obj.segment = analysis.label;
    obj.bbox_segment = det.bbox;
    obj.score = det.score;
    obj.center_panorama = to_panorama_coords(analysis.label, bbox_center(det.bbox), pano.intrinsics);
    obj.azimuth_deg = object_azimuth(obj.center_panorama, pano.intrinsics);
    const auto estimate = object_range(pano, analysis.label, det.bbox);
    obj.range_m = estimate.range_m;
    obj.range_source = estimate.source;
    objects.push_back(std::move(obj));
  }
  return objects;
}

}  // namespace panolidar
