#include <httplib.h>

#include "panolidar/backend.hpp"
#include "panolidar/image_io.hpp"

namespace panolidar {

using nlohmann::json;

namespace {

bool transient_status(int status) { return status == 502 || status == 503 || status == 504; }

std::string error_message(const httplib::Result& res) {
  try {
    const auto body = json::parse(res->body);
    if (body.is_object() && body.contains("error") && body.at("error").is_string()) {
      return body.at("error").get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return res->body.substr(0, 200);
}

}  // namespace

RemoteBackend::RemoteBackend(std::string endpoint) : RemoteBackend(std::move(endpoint), Options{}) {}

RemoteBackend::RemoteBackend(std::string endpoint, Options options) : options_(options) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must look like http://host:port, got " + endpoint);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint.substr(0, path_start);
  if (path_start != std::string::npos) base_path_ = endpoint.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  if (endpoint.compare(0, scheme_end, "http") != 0) {
    throw ConfigError("only plain http endpoints are supported: " + endpoint);
  }
}

json RemoteBackend::post(SegmentLabel segment, const std::string& path, const json& body) const {
  const auto payload = body.dump();
  const auto where = std::string(to_string(segment)) + ": POST " + base_path_ + path;
  std::string last_failure;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    // httplib::Client is not safe for concurrent use; one per call.
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(base_path_ + path, payload, "application/json");
    if (!res) {
      last_failure = where + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return json::parse(res->body);
      } catch (const json::exception& e) {
        throw ProtocolError(segment, where + " returned malformed JSON: " + e.what());
      }
    }
    if (transient_status(res->status)) {
      last_failure = where + " returned " + std::to_string(res->status) + ": " + error_message(res);
      continue;
    }
    if (res->status >= 500) {
      throw BackendUnavailable(segment, where + " returned " + std::to_string(res->status) + ": " + error_message(res));
    }
    throw ProtocolError(segment, where + " returned " + std::to_string(res->status) + ": " + error_message(res));
  }
  throw BackendUnavailable(segment, last_failure);
}

CaptionResponse RemoteBackend::caption(const SegmentRequest& request) {
  const auto reply = post(request.label, "/v1/caption", json{{"image_png_b64", base64_encode(request.png)}});
  if (!reply.is_object() || !reply.contains("caption") || !reply.at("caption").is_string()) {
    throw ProtocolError(request.label, std::string(to_string(request.label)) +
                                           ": caption response lacks a string \"caption\" field");
  }
  return {reply.at("caption").get<std::string>(), {}};
}

DetectResponse RemoteBackend::detect(const SegmentRequest& request, const std::optional<std::string>& prompt) {
  json body{{"image_png_b64", base64_encode(request.png)}};
  if (prompt) body["prompt"] = *prompt;
  const auto reply = post(request.label, "/v1/detect", body);
  if (!reply.is_object() || !reply.contains("detections") || !reply.at("detections").is_array()) {
    throw ProtocolError(request.label, std::string(to_string(request.label)) +
                                           ": detect response lacks a \"detections\" array");
  }
  DetectResponse out;
  for (const auto& d : reply.at("detections")) {
    try {
      out.detections.push_back(detection_from_json(d));
    } catch (const std::exception& e) {
      throw ProtocolError(request.label, std::string(to_string(request.label)) + ": bad detection: " + e.what());
    }
  }
  return out;
}

}  // namespace panolidar
