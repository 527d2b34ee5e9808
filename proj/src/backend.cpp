#include "panolidar/backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>

#include "panolidar/image_io.hpp"

namespace panolidar {

using nlohmann::json;

SegmentRequest make_request(const Segment& segment) {
  const auto& img = segment.image;
  GrayImage gray;
  if (img.ambient) {
    gray = GrayImage{*img.ambient, 16};
  } else if (img.signal) {
    gray = GrayImage{*img.signal, 16};
  } else {
    gray = encode_range(img.range, img.intrinsics.range_quantum_m);
  }
  return SegmentRequest{segment.label, segment.width(), segment.height(), encode_png(gray)};
}

Detection detection_from_json(const json& j) {
  if (!j.is_object()) throw Error("detection must be an object");
  const auto& label = j.at("label");
  const auto& bbox = j.at("bbox");
  if (!label.is_string()) throw Error("detection label must be a string");
  if (!bbox.is_array() || bbox.size() != 4) throw Error("detection bbox must be [u0, v0, u1, v1]");
  double c[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!bbox[i].is_number()) throw Error("detection bbox entries must be numbers");
    c[i] = bbox[i].get<double>();
    if (!std::isfinite(c[i]) || std::abs(c[i]) > 1e9) throw Error("detection bbox entries must be finite");
  }
  Detection d;
  d.label = label.get<std::string>();
  d.bbox = BBox{static_cast<int>(std::floor(c[0])), static_cast<int>(std::floor(c[1])),
                static_cast<int>(std::ceil(c[2])), static_cast<int>(std::ceil(c[3]))};
  if (j.contains("score") && !j.at("score").is_null()) {
    if (!j.at("score").is_number()) throw Error("detection score must be a number");
    d.score = j.at("score").get<double>();
  }
  return d;
}

json detection_to_json(const Detection& d) {
  json j{{"label", d.label}, {"bbox", {d.bbox.u0, d.bbox.v0, d.bbox.u1, d.bbox.v1}}};
  j["score"] = d.score ? json(*d.score) : json(nullptr);
  return j;
}

MockBackend MockBackend::from_json(const json& fixture) {
  if (!fixture.is_object()) throw FixtureParseError("mock fixture must be a JSON object keyed by segment label");
  MockBackend mock;
  for (const auto& [key, value] : fixture.items()) {
    const auto label = parse_segment_label(key);
    // Keys other than the four labels are never requested.
    if (!label) continue;
    if (!value.is_object()) throw FixtureParseError("fixture entry '" + key + "' must be an object");
    Entry entry;
    try {
      if (value.contains("caption")) entry.caption = value.at("caption").get<std::string>();
      if (value.contains("detections")) {
        for (const auto& d : value.at("detections")) entry.detections.push_back(detection_from_json(d));
      }
    } catch (const std::exception& e) {
      throw FixtureParseError("fixture entry '" + key + "': " + e.what());
    }
    mock.entries_.emplace(*label, std::move(entry));
  }
  return mock;
}

MockBackend MockBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open fixture " + path.string());
  json fixture;
  try {
    fixture = json::parse(in);
  } catch (const json::exception& e) {
    throw FixtureParseError(path.string() + ": " + e.what());
  }
  return from_json(fixture);
}

CaptionResponse MockBackend::caption(const SegmentRequest& request) {
  const auto it = entries_.find(request.label);
  if (it == entries_.end()) {
    return {"", {"mock fixture has no entry for " + std::string(to_string(request.label))}};
  }
  return {it->second.caption, {}};
}

DetectResponse MockBackend::detect(const SegmentRequest& request, const std::optional<std::string>&) {
  const auto it = entries_.find(request.label);
  if (it == entries_.end()) {
    return {{}, {"mock fixture has no entry for " + std::string(to_string(request.label))}};
  }
  return {it->second.detections, {}};
}

ClipResult clip_detections(std::vector<Detection> raw, int width, int height) {
  ClipResult result;
  for (auto& d : raw) {
    if (d.label.empty()) {
      ++result.dropped;
      continue;
    }
    BBox c{std::max(d.bbox.u0, 0), std::max(d.bbox.v0, 0), std::min(d.bbox.u1, width), std::min(d.bbox.v1, height)};
    if (!c.valid()) {
      ++result.dropped;
      continue;
    }
    if (c != d.bbox) ++result.clipped;
    d.bbox = c;
    if (d.score) d.score = std::clamp(*d.score, 0.0, 1.0);
    result.kept.push_back(std::move(d));
  }
  return result;
}

SegmentAnalysis analyze_segment(const Segment& segment, Backend& backend, const AnalyzeOptions& options) {
  SegmentAnalysis analysis;
  analysis.label = segment.label;
  const auto request = make_request(segment);
  auto add_warnings = [&](const std::vector<std::string>& ws) {
    for (const auto& w : ws) {
      if (std::find(analysis.warnings.begin(), analysis.warnings.end(), w) == analysis.warnings.end()) {
        analysis.warnings.push_back(w);
      }
    }
  };
  if (options.caption) {
    auto resp = backend.caption(request);
    analysis.caption = std::move(resp.caption);
    add_warnings(resp.warnings);
  }
  if (options.detect) {
    auto resp = backend.detect(request, options.prompt);
    add_warnings(resp.warnings);
    auto clipped = clip_detections(std::move(resp.detections), segment.width(), segment.height());
    const auto name = std::string(to_string(segment.label));
    for (std::size_t i = 0; i < clipped.clipped; ++i) {
      analysis.warnings.push_back(name + ": detection box clipped to segment bounds");
    }
    for (std::size_t i = 0; i < clipped.dropped; ++i) {
      analysis.warnings.push_back(name + ": detection dropped (empty label or box outside segment)");
    }
    analysis.detections = std::move(clipped.kept);
  }
  return analysis;
}

std::array<SegmentAnalysis, 4> analyze_segments(const std::array<Segment, 4>& segments, Backend& backend,
                                                const AnalyzeOptions& options) {
  std::array<std::future<SegmentAnalysis>, 4> pending;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    pending[i] = std::async(std::launch::async, [&, i] {
      const auto& seg = segments[i];
      try {
        return analyze_segment(seg, backend, options);
      } catch (const BackendUnavailable& e) {
        SegmentAnalysis failed;
        failed.label = seg.label;
        failed.status = AnalysisStatus::Unavailable;
        failed.error = e.what();
        return failed;
      } catch (const ProtocolError& e) {
        SegmentAnalysis failed;
        failed.label = seg.label;
        failed.status = AnalysisStatus::ProtocolError;
        failed.error = e.what();
        return failed;
      }
    });
  }
  std::array<SegmentAnalysis, 4> out;
  for (std::size_t i = 0; i < pending.size(); ++i) out[i] = pending[i].get();
  return out;
}

}  // namespace panolidar
