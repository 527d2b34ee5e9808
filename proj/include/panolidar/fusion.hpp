#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "panolidar/backend.hpp"
#include "panolidar/localization.hpp"

namespace panolidar {

struct SegmentScene {
  std::string caption;  // as returned by the backend
  std::vector<LocalizedObject> objects;
  AnalysisStatus status = AnalysisStatus::Ok;
  std::string error;

  friend bool operator==(const SegmentScene&, const SegmentScene&) = default;
};

struct SceneDescription {
  std::string frame_id;
  int width = 0;   // panorama the boxes refer to
  int height = 0;
  std::map<SegmentLabel, SegmentScene> per_segment;
  std::string merged_text;
  std::vector<std::string> warnings;

  friend bool operator==(const SceneDescription&, const SceneDescription&) = default;
};

/// "Looking towards the left, ", "From the front perspective, ", ...
std::string_view directional_prefix(SegmentLabel label);

/// One decimal, trailing ".0" trimmed: 4.9 -> "4.9", 11.0 -> "11".
std::string format_decimal(double value);

/// "(4.9[m], -101.7°)", or "(–, -101.7°)" without a range.
std::string format_annotation(const LocalizedObject& object);

struct Clause {
  std::string text;  // no trailing period is added to an "Also detected" list
  std::size_t inline_objects = 0;
  std::size_t appended_objects = 0;
};

/// Builds one segment's sentence: prefix, caption with inline annotations after the
/// first matching word for each object, and an "Also detected:" list for the rest.
Clause render_clause(SegmentLabel label, const SegmentScene& segment);

/// Merges four analyses (kSegmentOrder) and their localized objects into one scene.
SceneDescription merge_scene(const std::array<SegmentAnalysis, 4>& analyses,
                             const std::array<std::vector<LocalizedObject>, 4>& objects, std::string frame_id,
                             int width, int height);

/// Canonical JSON: sorted keys, two-space indent, trailing newline. Same scene, same bytes.
std::string render_scene_json(const SceneDescription& scene);
nlohmann::json scene_to_json(const SceneDescription& scene);

/// Inverse of render_scene_json. Throws FormatMismatch on schema violations.
SceneDescription scene_from_json(const nlohmann::json& j);

}  // namespace panolidar
