#include <gtest/gtest.h>

#include <random>
#include <set>

#include "panolidar/error.hpp"
#include "panolidar/segmentation.hpp"

using namespace panolidar;

namespace {

SensorIntrinsics with_width(int w, int h = 4) {
  auto intr = SensorIntrinsics::os1_128();
  intr.width = w;
  intr.height = h;
  return intr;
}

// Every pixel holds a value unique to its panorama column and row.
PanoramaImage labelled_panorama(int w, int h) {
  auto pano = PanoramaImage::blank(with_width(w, h));
  pano.ambient = Raster<std::uint16_t>(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      pano.range(u, v) = u + 1 + v * 0.001;
      (*pano.ambient)(u, v) = static_cast<std::uint16_t>(u);
    }
  }
  return pano;
}

}  // namespace

TEST(Segments, ColumnRangesAtOs1Width) {
  const auto segments = split_panorama(labelled_panorama(2048, 2));
  EXPECT_EQ(segments[0].label, SegmentLabel::Left);
  EXPECT_EQ(segments[1].label, SegmentLabel::Front);
  EXPECT_EQ(segments[2].label, SegmentLabel::Right);
  EXPECT_EQ(segments[3].label, SegmentLabel::Back);
  const auto& front = segments[1];
  EXPECT_EQ(front.width(), 512);
  EXPECT_EQ(front.height(), 2);
  EXPECT_EQ(front.column_map.front(), 768);
  EXPECT_EQ(front.column_map.back(), 1279);
  EXPECT_EQ(segments[0].column_map.front(), 256);
  EXPECT_EQ(segments[2].column_map.front(), 1280);
  const auto& back = segments[3];
  EXPECT_EQ(back.column_map.front(), 1792);
  EXPECT_EQ(back.column_map[255], 2047);
  EXPECT_EQ(back.column_map[256], 0);
  EXPECT_EQ(back.column_map.back(), 255);
}

TEST(Segments, BackMapsThroughTheSeam) {
  const auto intr = with_width(2048);
  EXPECT_EQ(to_panorama_coords(SegmentLabel::Back, {300, 3}, intr), (PixelCoord{44, 3}));
  EXPECT_EQ(to_panorama_coords(SegmentLabel::Front, {0, 0}, intr), (PixelCoord{768, 0}));
  EXPECT_THROW(to_panorama_coords(SegmentLabel::Front, {512, 0}, intr), OutOfBounds);
  EXPECT_THROW(to_panorama_coords(SegmentLabel::Front, {-1, 0}, intr), OutOfBounds);
  EXPECT_THROW(to_panorama_coords(SegmentLabel::Front, {0, 4}, intr), OutOfBounds);
}

TEST(Segments, WidthMustBeDivisibleByEight) {
  EXPECT_THROW(split_panorama(PanoramaImage::blank(with_width(2044))), BadWidth);
  EXPECT_THROW(split_panorama(PanoramaImage::blank(with_width(4))), BadWidth);
  EXPECT_NO_THROW(split_panorama(PanoramaImage::blank(with_width(8))));
}

TEST(Segments, PartitionCoversEveryPixelExactlyOnce) {
  for (int w : {8, 64, 2048, 3600}) {
    const auto pano = labelled_panorama(w, 3);
    const auto segments = split_panorama(pano);
    std::multiset<int> columns;
    for (const auto& seg : segments) {
      ASSERT_EQ(seg.width(), w / 4);
      for (int u = 0; u < seg.width(); ++u) {
        const auto p = to_panorama_coords(seg.label, {u, 0}, pano.intrinsics);
        EXPECT_EQ(p.u, seg.column_map[static_cast<std::size_t>(u)]);
        columns.insert(p.u);
        for (int v = 0; v < 3; ++v) {
          EXPECT_EQ(seg.image.range(u, v), pano.range(p.u, v));
          EXPECT_EQ((*seg.image.ambient)(u, v), (*pano.ambient)(p.u, v));
        }
      }
    }
    ASSERT_EQ(columns.size(), static_cast<std::size_t>(w));
    for (int u = 0; u < w; ++u) EXPECT_EQ(columns.count(u), 1u) << u;
  }
}

TEST(Segments, AzimuthBoundariesAreHalfOpen) {
  EXPECT_EQ(segment_of_azimuth(-135.0), SegmentLabel::Left);
  EXPECT_EQ(segment_of_azimuth(-45.0), SegmentLabel::Front);
  EXPECT_EQ(segment_of_azimuth(0.0), SegmentLabel::Front);
  EXPECT_EQ(segment_of_azimuth(45.0), SegmentLabel::Right);
  EXPECT_EQ(segment_of_azimuth(135.0), SegmentLabel::Back);
  EXPECT_EQ(segment_of_azimuth(-180.0), SegmentLabel::Back);
  EXPECT_EQ(segment_of_azimuth(-135.0001), SegmentLabel::Back);
  EXPECT_EQ(segment_of_azimuth(-101.7), SegmentLabel::Left);
}

TEST(Segments, ColumnAzimuthAgreesWithSegmentOfAzimuth) {
  for (int w : {8, 2048, 3600}) {
    const auto intr = with_width(w);
    for (const auto label : kSegmentOrder) {
      for (int u = 0; u < w / 4; ++u) {
        const auto p = to_panorama_coords(label, {u, 0}, intr);
        ASSERT_EQ(segment_of_azimuth(azimuth_of_column(p.u, intr)), label) << w << " " << u;
      }
    }
  }
}

TEST(Segments, LabelNames) {
  for (const auto label : kSegmentOrder) EXPECT_EQ(parse_segment_label(to_string(label)), label);
  EXPECT_EQ(parse_segment_label("Front"), std::nullopt);
}

TEST(Segments, MinimalWidthEight) {
  const auto intr = with_width(8);
  EXPECT_EQ(to_panorama_coords(SegmentLabel::Left, {0, 0}, intr).u, 1);
  const auto segments = split_panorama(PanoramaImage::blank(intr));
  for (const auto& s : segments) EXPECT_EQ(s.width(), 2);
  EXPECT_EQ(segments[3].column_map, (std::vector<int>{7, 0}));
}
