#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "panolidar/error.hpp"
#include "panolidar/segmentation.hpp"

namespace panolidar {

/// Half-open pixel box [u0, u1) x [v0, v1).
struct BBox {
  int u0 = 0;
  int v0 = 0;
  int u1 = 0;
  int v1 = 0;

  int width() const { return u1 - u0; }
  int height() const { return v1 - v0; }
  bool valid() const { return u0 < u1 && v0 < v1; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Box in the coordinates of the segment image it was detected in.
struct Detection {
  std::string label;
  BBox bbox;
  std::optional<double> score;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Failure talking to a backend. Carries the segment so a partial scene can say which view is missing.
class BackendError : public Error {
 public:
  BackendError(SegmentLabel segment, const std::string& what) : Error(what), segment_(segment) {}
  SegmentLabel segment() const { return segment_; }

 private:
  SegmentLabel segment_;
};

/// Connection refused, timeout, or 5xx after the retry.
class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};

/// The backend answered but the answer is not the wire format (4xx, bad JSON, missing fields).
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// What a backend receives for one segment: the label plus the segment image as PNG.
struct SegmentRequest {
  SegmentLabel label = SegmentLabel::Front;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> png;
};

/// Image sent to the model: ambient if present, else signal, else the quantized range channel.
SegmentRequest make_request(const Segment& segment);

struct CaptionResponse {
  std::string caption;
  std::vector<std::string> warnings;
};

struct DetectResponse {
  std::vector<Detection> detections;
  std::vector<std::string> warnings;
};

/// Vision backend. Implementations must tolerate four concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual CaptionResponse caption(const SegmentRequest& request) = 0;
  virtual DetectResponse detect(const SegmentRequest& request, const std::optional<std::string>& prompt) = 0;
};

/// Answers from a JSON fixture keyed by segment label:
/// {"front": {"caption": "...", "detections": [{"label": ..., "bbox": [...], "score": ...}]}}.
class MockBackend final : public Backend {
 public:
  struct Entry {
    std::string caption;
    std::vector<Detection> detections;
  };

  /// Throws FixtureParseError on malformed input.
  static MockBackend from_json(const nlohmann::json& fixture);
  static MockBackend from_file(const std::filesystem::path& path);

  CaptionResponse caption(const SegmentRequest& request) override;
  DetectResponse detect(const SegmentRequest& request, const std::optional<std::string>& prompt) override;

  bool has_entry(SegmentLabel label) const { return entries_.contains(label); }

 private:
  std::map<SegmentLabel, Entry> entries_;
};

/// HTTP/1.1 + JSON client for the /v1/caption and /v1/detect endpoints.
class RemoteBackend final : public Backend {
 public:
  struct Options {
    std::chrono::milliseconds timeout{30'000};
    int retries = 1;
  };

  /// `endpoint` is "http://host:port" with an optional base path.
  explicit RemoteBackend(std::string endpoint);
  RemoteBackend(std::string endpoint, Options options);

  CaptionResponse caption(const SegmentRequest& request) override;
  DetectResponse detect(const SegmentRequest& request, const std::optional<std::string>& prompt) override;

 private:
  nlohmann::json post(SegmentLabel segment, const std::string& path, const nlohmann::json& body) const;

  std::string scheme_host_port_;
  std::string base_path_;
  Options options_;
};

/// Parses the wire detection schema. Boxes may be fractional; they are widened to
/// whole pixels (floor of the low edge, ceil of the high edge).
Detection detection_from_json(const nlohmann::json& j);
nlohmann::json detection_to_json(const Detection& d);

enum class AnalysisStatus { Ok, Unavailable, ProtocolError };

struct SegmentAnalysis {
  SegmentLabel label = SegmentLabel::Front;
  std::string caption;
  std::vector<Detection> detections;
  std::vector<std::string> warnings;
  AnalysisStatus status = AnalysisStatus::Ok;
  std::string error;

  bool failed() const { return status != AnalysisStatus::Ok; }
};

struct AnalyzeOptions {
  bool caption = true;
  bool detect = true;
  std::optional<std::string> prompt;
};

/// Outcome of clipping raw detections to a segment.
struct ClipResult {
  std::vector<Detection> kept;
  std::size_t clipped = 0;
  std::size_t dropped = 0;
};

/// Boxes partly outside [0, width) x [0, height) are clipped; empty boxes and
/// empty labels are dropped; scores are clamped into [0, 1].
ClipResult clip_detections(std::vector<Detection> raw, int width, int height);

/// Captions and detects one segment. Throws BackendUnavailable / ProtocolError.
SegmentAnalysis analyze_segment(const Segment& segment, Backend& backend, const AnalyzeOptions& options = {});

/// Runs all four segments concurrently. Failures are recorded in the returned
/// analysis (status + error + warning), never thrown or dropped.
std::array<SegmentAnalysis, 4> analyze_segments(const std::array<Segment, 4>& segments, Backend& backend,
                                                const AnalyzeOptions& options = {});

}  // namespace panolidar
