#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace panolidar {

enum class BackendKind { Mock, Remote };

struct EmitFlags {
  bool scene_json = true;
  bool merged_text = true;
  bool segment_pngs = false;
  bool annotated_panorama = false;
};

struct RunConfig {
  std::filesystem::path intrinsics;  // empty: os1-128 defaults
  BackendKind backend = BackendKind::Mock;
  std::string endpoint;
  std::filesystem::path fixture;
  double timeout_s = 30.0;
  std::filesystem::path out_dir = ".";
  EmitFlags emit;
  bool strict = false;
  std::optional<std::string> prompt;

  /// Remote needs an endpoint, mock needs a fixture. Throws ConfigError.
  void validate() const;
};

/// A partially specified configuration. Later layers override earlier ones field by field.
struct ConfigLayer {
  std::optional<std::filesystem::path> intrinsics;
  std::optional<BackendKind> backend;
  std::optional<std::string> endpoint;
  std::optional<std::filesystem::path> fixture;
  std::optional<double> timeout_s;
  std::optional<std::filesystem::path> out_dir;
  std::optional<bool> emit_scene_json;
  std::optional<bool> emit_merged_text;
  std::optional<bool> emit_segment_pngs;
  std::optional<bool> emit_annotated_panorama;
  std::optional<bool> strict;
  std::optional<std::string> prompt;

  void apply_to(RunConfig& config) const;
};

std::optional<BackendKind> parse_backend_kind(std::string_view name);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> system_env(const std::string& name);

/// PANOLIDAR_ENDPOINT and PANOLIDAR_TIMEOUT.
ConfigLayer layer_from_env(const EnvLookup& env);

/// Keys: intrinsics, backend, endpoint, fixture, timeout, out, strict, prompt and an
/// [emit] table with scene_json, merged_text, segment_pngs, annotated_panorama.
/// Relative paths resolve against the config file's directory.
ConfigLayer layer_from_toml(const std::filesystem::path& path);

/// defaults < config file < environment < flags
RunConfig resolve_config(const ConfigLayer& flags, const EnvLookup& env,
                         const std::optional<std::filesystem::path>& config_file);

}  // namespace panolidar
