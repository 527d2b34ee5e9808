#include "panolidar/segmentation.hpp"

#include <string>

#include "panolidar/error.hpp"

namespace panolidar {

namespace {

template <typename T>
Raster<T> gather_columns(const Raster<T>& src, const std::vector<int>& columns) {
  Raster<T> out(static_cast<int>(columns.size()), src.height());
  for (int v = 0; v < src.height(); ++v) {
    for (int u = 0; u < out.width(); ++u) out(u, v) = src(columns[static_cast<std::size_t>(u)], v);
  }
  return out;
}

}  // namespace

std::string_view to_string(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::Left: return "left";
    case SegmentLabel::Front: return "front";
    case SegmentLabel::Right: return "right";
    case SegmentLabel::Back: return "back";
  }
  return "front";
}

std::optional<SegmentLabel> parse_segment_label(std::string_view name) {
  for (const auto label : kSegmentOrder) {
    if (to_string(label) == name) return label;
  }
  return std::nullopt;
}

int segment_start(SegmentLabel label, int width) {
  const int eighth = width / 8;
  switch (label) {
    case SegmentLabel::Left: return eighth;
    case SegmentLabel::Front: return 3 * eighth;
    case SegmentLabel::Right: return 5 * eighth;
    case SegmentLabel::Back: return 7 * eighth;
  }
  return 0;
}

std::array<Segment, 4> split_panorama(const PanoramaImage& pano) {
  const int w = pano.width();
  if (w < 8 || w % 8 != 0) throw BadWidth("panorama width " + std::to_string(w) + " is not divisible by 8");
  const int quarter = w / 4;

  std::array<Segment, 4> segments;
  for (std::size_t i = 0; i < kSegmentOrder.size(); ++i) {
    auto& seg = segments[i];
    seg.label = kSegmentOrder[i];
    const int start = segment_start(seg.label, w);
    seg.column_map.resize(static_cast<std::size_t>(quarter));
    for (int u = 0; u < quarter; ++u) seg.column_map[static_cast<std::size_t>(u)] = (start + u) % w;

    seg.image.intrinsics = pano.intrinsics;
    seg.image.range = gather_columns(pano.range, seg.column_map);
    if (pano.ambient) seg.image.ambient = gather_columns(*pano.ambient, seg.column_map);
    if (pano.signal) seg.image.signal = gather_columns(*pano.signal, seg.column_map);
    if (pano.reflectivity) seg.image.reflectivity = gather_columns(*pano.reflectivity, seg.column_map);
  }
  return segments;
}

SegmentLabel segment_of_azimuth(double theta_deg) {
  if (theta_deg >= -135.0 && theta_deg < -45.0) return SegmentLabel::Left;
  if (theta_deg >= -45.0 && theta_deg < 45.0) return SegmentLabel::Front;
  if (theta_deg >= 45.0 && theta_deg < 135.0) return SegmentLabel::Right;
  return SegmentLabel::Back;
}

PixelCoord to_panorama_coords(SegmentLabel label, PixelCoord in_segment, const SensorIntrinsics& intr) {
  const int quarter = intr.width / 4;
  if (in_segment.u < 0 || in_segment.u >= quarter || in_segment.v < 0 || in_segment.v >= intr.height) {
    throw OutOfBounds("pixel (" + std::to_string(in_segment.u) + ", " + std::to_string(in_segment.v) +
                      ") outside the " + std::string(to_string(label)) + " segment");
  }
  return {(segment_start(label, intr.width) + in_segment.u) % intr.width, in_segment.v};
}

}  // namespace panolidar
