#pragma once

#include "panolidar/fusion.hpp"
#include "panolidar/image_io.hpp"

namespace panolidar {

/// Draws each object's box outline and "(R[m], A°)" tag at full intensity onto a
/// copy of the panorama. Boxes are drawn in segment space and mapped column by
/// column, so a Back box crossing the seam appears as two strips. Text is clipped
/// to the box interior. Throws DimensionMismatch when the image and scene sizes differ.
GrayImage annotate_panorama(const GrayImage& panorama, const SceneDescription& scene);

}  // namespace panolidar
