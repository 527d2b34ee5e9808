#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "panolidar/projection.hpp"

namespace panolidar {

/// Azimuth ranges (half-open): Left [-135, -45), Front [-45, 45),
/// Right [45, 135), Back [135, 180) and [-180, -135).
enum class SegmentLabel { Left, Front, Right, Back };

/// Fixed presentation order.
inline constexpr std::array<SegmentLabel, 4> kSegmentOrder = {SegmentLabel::Left, SegmentLabel::Front,
                                                              SegmentLabel::Right, SegmentLabel::Back};

std::string_view to_string(SegmentLabel label);  // "left", "front", ...
std::optional<SegmentLabel> parse_segment_label(std::string_view name);

/// First panorama column of a segment: W/8, 3W/8, 5W/8, 7W/8.
int segment_start(SegmentLabel label, int width);

/// One 90 degree slice. `image` is contiguous even for Back, whose columns wrap
/// past the panorama's right edge.
struct Segment {
  SegmentLabel label = SegmentLabel::Front;
  PanoramaImage image;
  std::vector<int> column_map;  // segment column -> panorama column

  int width() const { return image.width(); }
  int height() const { return image.height(); }
};

/// Throws BadWidth when W is not divisible by 8. Returned in kSegmentOrder.
std::array<Segment, 4> split_panorama(const PanoramaImage& pano);

SegmentLabel segment_of_azimuth(double theta_deg);

/// (segment_start + u) mod W, v unchanged. Throws OutOfBounds outside the segment.
PixelCoord to_panorama_coords(SegmentLabel label, PixelCoord in_segment, const SensorIntrinsics& intr);

}  // namespace panolidar
