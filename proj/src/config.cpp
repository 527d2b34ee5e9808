#include "panolidar/config.hpp"

#include <charconv>
#include <cstdlib>

#include "panolidar/error.hpp"
#include "panolidar/toml_lite.hpp"

namespace panolidar {

namespace {

double parse_timeout(const std::string& text, std::string_view origin) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0.0)) {
    throw ConfigError(std::string(origin) + ": timeout must be a positive number of seconds, got '" + text + "'");
  }
  return v;
}

template <typename T>
void set_if(const std::optional<T>& value, T& target) {
  if (value) target = *value;
}

}  // namespace

void RunConfig::validate() const {
  if (backend == BackendKind::Remote && endpoint.empty()) {
    throw ConfigError("--backend remote requires --endpoint (or PANOLIDAR_ENDPOINT)");
  }
  if (backend == BackendKind::Mock && fixture.empty()) throw ConfigError("--backend mock requires --fixture");
  if (!(timeout_s > 0.0)) throw ConfigError("timeout must be positive");
}

void ConfigLayer::apply_to(RunConfig& config) const {
  set_if(intrinsics, config.intrinsics);
  set_if(backend, config.backend);
  set_if(endpoint, config.endpoint);
  set_if(fixture, config.fixture);
  set_if(timeout_s, config.timeout_s);
  set_if(out_dir, config.out_dir);
  set_if(emit_scene_json, config.emit.scene_json);
  set_if(emit_merged_text, config.emit.merged_text);
  set_if(emit_segment_pngs, config.emit.segment_pngs);
  set_if(emit_annotated_panorama, config.emit.annotated_panorama);
  set_if(strict, config.strict);
  if (prompt) config.prompt = prompt;
}

std::optional<BackendKind> parse_backend_kind(std::string_view name) {
  if (name == "mock") return BackendKind::Mock;
  if (name == "remote") return BackendKind::Remote;
  return std::nullopt;
}

std::optional<std::string> system_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

ConfigLayer layer_from_env(const EnvLookup& env) {
  ConfigLayer layer;
  if (auto v = env("PANOLIDAR_ENDPOINT"); v && !v->empty()) layer.endpoint = *v;
  if (auto v = env("PANOLIDAR_TIMEOUT"); v && !v->empty()) layer.timeout_s = parse_timeout(*v, "PANOLIDAR_TIMEOUT");
  return layer;
}

ConfigLayer layer_from_toml(const std::filesystem::path& path) {
  const auto doc = load_toml(path);
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_relative() ? base / fp : fp;
  };
  ConfigLayer layer;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "intrinsics") layer.intrinsics = resolve(value.get<std::string>());
      else if (key == "backend") {
        layer.backend = parse_backend_kind(value.get<std::string>());
        if (!layer.backend) throw ConfigError(path.string() + ": backend must be mock or remote");
      } else if (key == "endpoint") layer.endpoint = value.get<std::string>();
      else if (key == "fixture") layer.fixture = resolve(value.get<std::string>());
      else if (key == "timeout") {
        layer.timeout_s = value.get<double>();
        if (!(*layer.timeout_s > 0.0)) throw ConfigError(path.string() + ": timeout must be positive");
      } else if (key == "out") layer.out_dir = resolve(value.get<std::string>());
      else if (key == "strict") layer.strict = value.get<bool>();
      else if (key == "prompt") layer.prompt = value.get<std::string>();
      else if (key == "emit") {
        for (const auto& [flag, on] : value.items()) {
          if (flag == "scene_json") layer.emit_scene_json = on.get<bool>();
          else if (flag == "merged_text") layer.emit_merged_text = on.get<bool>();
          else if (flag == "segment_pngs") layer.emit_segment_pngs = on.get<bool>();
          else if (flag == "annotated_panorama") layer.emit_annotated_panorama = on.get<bool>();
          else throw ConfigError(path.string() + ": unknown emit flag '" + flag + "'");
        }
      } else {
        throw ConfigError(path.string() + ": unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return layer;
}

RunConfig resolve_config(const ConfigLayer& flags, const EnvLookup& env,
                         const std::optional<std::filesystem::path>& config_file) {
  RunConfig config;
  if (config_file) layer_from_toml(*config_file).apply_to(config);
  layer_from_env(env).apply_to(config);
  flags.apply_to(config);
  return config;
}

}  // namespace panolidar
