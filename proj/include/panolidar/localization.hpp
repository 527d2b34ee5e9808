#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panolidar/backend.hpp"
#include "panolidar/projection.hpp"
#include "panolidar/segmentation.hpp"

namespace panolidar {

enum class RangeSource { CenterPixel, NearestValidInBBox, Unavailable };

std::string_view to_string(RangeSource source);  // "center_pixel", ...
std::optional<RangeSource> parse_range_source(std::string_view name);

struct RangeEstimate {
  std::optional<double> range_m;
  RangeSource source = RangeSource::Unavailable;
};

/// A detection placed around the sensor. The box stays in segment coordinates;
/// `center_panorama` is where the range and azimuth were read.
struct LocalizedObject {
  std::string label;
  SegmentLabel segment = SegmentLabel::Front;
  BBox bbox_segment;
  PixelCoord center_panorama;
  std::optional<double> range_m;  // > 0 when present
  double azimuth_deg = 0.0;       // [-180, 180)
  RangeSource range_source = RangeSource::Unavailable;
  std::optional<double> score;

  friend bool operator==(const LocalizedObject&, const LocalizedObject&) = default;
};

/// Integer midpoint (floor) of a box, in the box's own coordinates.
PixelCoord bbox_center(const BBox& bbox);

/// Angle of the panorama column holding the box center: 360 * (u - W/2) / W.
double object_azimuth(PixelCoord center_panorama, const SensorIntrinsics& intr);

/// Reads the distance image at the box center. When the center has no return,
/// searches Chebyshev rings around it (clipped to the box) and returns the
/// smallest positive range of the first ring that has one.
RangeEstimate object_range(const PanoramaImage& pano, SegmentLabel segment, const BBox& bbox_segment);

/// One object per detection, in detection order.
std::vector<LocalizedObject> localize(const SegmentAnalysis& analysis, const PanoramaImage& pano);

}  // namespace panolidar
