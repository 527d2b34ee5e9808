#include "panolidar/fusion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace panolidar {

using nlohmann::json;

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool ends_sentence(std::string_view s) { return !s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?'); }

// End offset of a whole-word occurrence of `needle` starting at `pos`, allowing a
// plural "s"/"es" suffix; npos when the occurrence is part of a longer word.
std::size_t word_end(std::string_view hay, std::size_t pos, std::size_t len) {
  if (pos > 0 && is_word_char(hay[pos - 1])) return std::string_view::npos;
  auto end = pos + len;
  for (std::string_view suffix : {"es", "s", ""}) {
    if (hay.substr(end, suffix.size()) == suffix) {
      const auto e = end + suffix.size();
      if (e == hay.size() || !is_word_char(hay[e])) return e;
    }
  }
  return std::string_view::npos;
}

// Earliest word matching the label (or its singular) whose end is not taken yet.
std::size_t find_anchor(std::string_view caption_lower, std::string_view label, const std::vector<std::size_t>& taken) {
  std::vector<std::string> needles{lower(trim(label))};
  if (needles[0].size() > 1 && needles[0].back() == 's') needles.push_back(needles[0].substr(0, needles[0].size() - 1));
  std::size_t best = std::string_view::npos;
  std::size_t best_start = std::string_view::npos;
  for (const auto& needle : needles) {
    if (needle.empty()) continue;
    for (auto pos = caption_lower.find(needle); pos != std::string_view::npos;
         pos = caption_lower.find(needle, pos + 1)) {
      const auto end = word_end(caption_lower, pos, needle.size());
      if (end == std::string_view::npos) continue;
      if (std::find(taken.begin(), taken.end(), end) != taken.end()) continue;
      if (pos < best_start) {
        best_start = pos;
        best = end;
      }
      break;
    }
  }
  return best;
}

json object_to_json(const LocalizedObject& o) {
  json j;
  j["label"] = o.label;
  j["range_m"] = o.range_m ? json(*o.range_m) : json(nullptr);
  j["azimuth_deg"] = o.azimuth_deg;
  j["bbox_segment"] = {o.bbox_segment.u0, o.bbox_segment.v0, o.bbox_segment.u1, o.bbox_segment.v1};
  j["range_source"] = std::string(to_string(o.range_source));
  j["score"] = o.score ? json(*o.score) : json(nullptr);
  return j;
}

}  // namespace

std::string_view directional_prefix(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::Left: return "Looking towards the left, ";
    case SegmentLabel::Front: return "From the front perspective, ";
    case SegmentLabel::Right: return "As seen from the right, ";
    case SegmentLabel::Back: return "From the back viewpoint, ";
  }
  return "";
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  std::string s = buf;
  if (s.size() > 2 && s.ends_with(".0")) s.resize(s.size() - 2);
  if (s == "-0") s = "0";
  return s;
}

std::string format_annotation(const LocalizedObject& object) {
  const std::string range = object.range_m ? format_decimal(*object.range_m) + "[m]" : "\xE2\x80\x93";
  return "(" + range + ", " + format_decimal(object.azimuth_deg) + "\xC2\xB0)";
}

Clause render_clause(SegmentLabel label, const SegmentScene& segment) {
  Clause clause;
  const auto caption = std::string(trim(segment.caption));
  const bool described = segment.status == AnalysisStatus::Ok && !caption.empty();

  std::string body = described ? caption : "no description available";
  body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));

  // Left-to-right by box center; ties keep detection order.
  std::vector<std::size_t> order(segment.objects.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bbox_center(segment.objects[a].bbox_segment).u < bbox_center(segment.objects[b].bbox_segment).u;
  });

  std::vector<std::pair<std::size_t, std::string>> inserts;  // (offset, annotation)
  std::vector<std::size_t> taken;
  std::vector<std::size_t> appendix;
  const auto body_lower = lower(body);
  for (const auto idx : order) {
    const auto& obj = segment.objects[idx];
    const auto anchor = described ? find_anchor(body_lower, obj.label, taken) : std::string_view::npos;
    if (anchor == std::string_view::npos) {
      appendix.push_back(idx);
      continue;
    }
    taken.push_back(anchor);
    inserts.emplace_back(anchor, " " + format_annotation(obj));
  }
  std::sort(inserts.begin(), inserts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [offset, text] : inserts) body.insert(offset, text);
  clause.inline_objects = inserts.size();

  clause.text = std::string(directional_prefix(label)) + body;
  if (!appendix.empty()) {
    if (!ends_sentence(clause.text)) clause.text += ".";
    clause.text += " Also detected: ";
    for (std::size_t i = 0; i < appendix.size(); ++i) {
      const auto& obj = segment.objects[appendix[i]];
      if (i > 0) clause.text += ", ";
      clause.text += obj.label + " " + format_annotation(obj);
    }
  }
  clause.appended_objects = appendix.size();
  return clause;
}

SceneDescription merge_scene(const std::array<SegmentAnalysis, 4>& analyses,
                             const std::array<std::vector<LocalizedObject>, 4>& objects, std::string frame_id,
                             int width, int height) {
  SceneDescription scene;
  scene.frame_id = std::move(frame_id);
  scene.width = width;
  scene.height = height;

  for (std::size_t i = 0; i < kSegmentOrder.size(); ++i) {
    const auto label = kSegmentOrder[i];
    const auto it = std::find_if(analyses.begin(), analyses.end(), [&](const auto& a) { return a.label == label; });
    auto& seg = scene.per_segment[label];
    if (it != analyses.end()) {
      seg.caption = it->caption;
      seg.status = it->status;
      seg.error = it->error;
      const auto k = static_cast<std::size_t>(it - analyses.begin());
      seg.objects = objects[k];
      for (const auto& w : it->warnings) scene.warnings.push_back(w);
    } else {
      seg.status = AnalysisStatus::Unavailable;
      seg.error = "no analysis submitted";
    }
  }

  std::string merged;
  for (const auto label : kSegmentOrder) {
    const auto& seg = scene.per_segment.at(label);
    const auto name = std::string(to_string(label));
    if (seg.status != AnalysisStatus::Ok) {
      scene.warnings.push_back(name + ": no description available (" + seg.error + ")");
    } else if (trim(seg.caption).empty()) {
      scene.warnings.push_back(name + ": backend returned an empty caption");
    }
    auto clause = render_clause(label, seg).text;
    if (!ends_sentence(clause)) clause += ".";
    if (!merged.empty()) merged += " ";
    merged += clause;
  }
  scene.merged_text = std::move(merged);
  return scene;
}

json scene_to_json(const SceneDescription& scene) {
  json segments = json::object();
  for (const auto& [label, seg] : scene.per_segment) {
    json objs = json::array();
    for (const auto& o : seg.objects) objs.push_back(object_to_json(o));
    segments[std::string(to_string(label))] = json{{"caption", seg.caption}, {"objects", objs}};
  }
  json j;
  j["frame_id"] = scene.frame_id;
  j["image"] = json{{"width", scene.width}, {"height", scene.height}};
  j["segments"] = segments;
  j["merged_text"] = scene.merged_text;
  j["warnings"] = scene.warnings;
  return j;
}

std::string render_scene_json(const SceneDescription& scene) { return scene_to_json(scene).dump(2) + "\n"; }

SceneDescription scene_from_json(const json& j) {
  SceneDescription scene;
  try {
    scene.frame_id = j.at("frame_id").get<std::string>();
    scene.width = j.at("image").at("width").get<int>();
    scene.height = j.at("image").at("height").get<int>();
    scene.merged_text = j.at("merged_text").get<std::string>();
    scene.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& [key, value] : j.at("segments").items()) {
      const auto label = parse_segment_label(key);
      if (!label) throw FormatMismatch("unknown segment '" + key + "'");
      SegmentScene seg;
      seg.caption = value.at("caption").get<std::string>();
      for (const auto& o : value.at("objects")) {
        LocalizedObject obj;
        obj.label = o.at("label").get<std::string>();
        obj.segment = *label;
        if (!o.at("range_m").is_null()) obj.range_m = o.at("range_m").get<double>();
        obj.azimuth_deg = o.at("azimuth_deg").get<double>();
        const auto b = o.at("bbox_segment").get<std::vector<int>>();
        if (b.size() != 4) throw FormatMismatch("bbox_segment must have four entries");
        obj.bbox_segment = BBox{b[0], b[1], b[2], b[3]};
        const auto src = parse_range_source(o.at("range_source").get<std::string>());
        if (!src) throw FormatMismatch("unknown range_source");
        obj.range_source = *src;
        if (!o.at("score").is_null()) obj.score = o.at("score").get<double>();
        if (scene.width > 0 && scene.height > 0 && obj.bbox_segment.valid()) {
          SensorIntrinsics intr;
          intr.width = scene.width;
          intr.height = scene.height;
          obj.center_panorama = to_panorama_coords(*label, bbox_center(obj.bbox_segment), intr);
        }
        seg.objects.push_back(std::move(obj));
      }
      scene.per_segment[*label] = std::move(seg);
    }
  } catch (const json::exception& e) {
    throw FormatMismatch(std::string("scene json: ") + e.what());
  } catch (const OutOfBounds& e) {
    throw FormatMismatch(std::string("scene json: ") + e.what());
  }
  return scene;
}

}  // namespace panolidar
