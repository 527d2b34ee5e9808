#pragma once

#include <optional>

#include "panolidar/backend.hpp"
#include "panolidar/pointcloud.hpp"
#include "panolidar/projection.hpp"
#include "panolidar/segmentation.hpp"

namespace panolidar::testkit {

/// Reference rasterizer: groups points by pixel, then takes the (range, index)
/// minimum of each group. Slow and obvious on purpose; compare against project_cloud.
PanoramaImage oracle_project(const PointCloud& cloud, const SensorIntrinsics& intr);

/// Reference fallback range: every pixel of the box sorted by (Chebyshev distance to
/// the center, value); the first positive one wins.
std::optional<double> oracle_object_range(const PanoramaImage& pano, SegmentLabel segment, const BBox& bbox);

}  // namespace panolidar::testkit
