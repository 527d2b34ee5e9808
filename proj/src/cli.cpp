#include "panolidar/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "panolidar/annotate.hpp"
#include "panolidar/backend.hpp"
#include "panolidar/error.hpp"
#include "panolidar/fusion.hpp"
#include "panolidar/image_io.hpp"
#include "panolidar/localization.hpp"
#include "panolidar/pointcloud.hpp"
#include "panolidar/projection.hpp"
#include "panolidar/segmentation.hpp"

namespace panolidar::cli {

namespace fs = std::filesystem;

namespace {

struct SharedFlags {
  std::string intrinsics;
  std::string backend;
  std::string endpoint;
  std::string fixture;
  std::optional<double> timeout;
  std::string out;
  bool strict = false;
  std::string config;
};

struct InputFlags {
  std::string input;
  std::string format;
  std::string panorama;
  std::string ambient;
  std::string stem;
  bool euclidean = false;
  unsigned workers = 1;
};

SensorIntrinsics intrinsics_from(const std::string& path) {
  return path.empty() ? SensorIntrinsics::os1_128() : load_intrinsics(path);
}

CloudFormat resolve_format(const InputFlags& in) {
  if (!in.format.empty()) {
    const auto f = parse_cloud_format(in.format);
    if (!f) throw ConfigError("unknown --format '" + in.format + "' (csv, pcd_ascii, raw_f32)");
    return *f;
  }
  const auto f = cloud_format_from_extension(in.input);
  if (!f) throw ConfigError("cannot infer the format of " + in.input + "; pass --format");
  return *f;
}

std::string default_stem(const InputFlags& in) {
  if (!in.stem.empty()) return in.stem;
  auto stem = fs::path(in.input.empty() ? in.panorama : in.input).stem().string();
  if (!in.panorama.empty() && stem.ends_with("_range")) stem.resize(stem.size() - 6);
  return stem.empty() ? "frame" : stem;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

struct LoadedPanorama {
  PanoramaImage panorama;
  std::optional<ProjectionStats> stats;
  std::optional<ParseSummary> parse;
};

LoadedPanorama load_panorama(const InputFlags& in, const std::string& intrinsics_path) {
  if (in.input.empty() == in.panorama.empty()) throw ConfigError("give exactly one of --input or --panorama");
  LoadedPanorama loaded;
  if (!in.input.empty()) {
    const auto intr = intrinsics_from(intrinsics_path);
    const auto cloud = parse_cloud(in.input, resolve_format(in));
    ProjectionOptions opts;
    opts.range_mode = in.euclidean ? RangeMode::Euclidean : RangeMode::Horizontal;
    opts.workers = std::max(1u, in.workers);
    auto result = project_cloud(cloud, intr, opts);
    loaded.panorama = std::move(result.panorama);
    loaded.stats = result.stats;
    loaded.parse = cloud.summary;
    return loaded;
  }
  auto intr = intrinsics_from(intrinsics_path);
  if (intrinsics_path.empty()) {
    // Take the size from the image; keep default elevation bounds and quantum.
    const auto probe = read_png(in.panorama);
    intr.width = probe.pixels.width();
    intr.height = probe.pixels.height();
    intr.validate();
  }
  loaded.panorama = read_panorama(in.panorama, intr, in.ambient);
  return loaded;
}

GrayImage display_channel(const PanoramaImage& pano) {
  if (pano.ambient) return GrayImage{*pano.ambient, 16};
  if (pano.signal) return GrayImage{*pano.signal, 16};
  return encode_range(pano.range, pano.intrinsics.range_quantum_m);
}

void add_input_flags(CLI::App* cmd, InputFlags& in, bool allow_panorama) {
  cmd->add_option("--input,-i", in.input, "Point cloud file");
  cmd->add_option("--format", in.format, "csv | pcd_ascii | raw_f32 (default: from extension)");
  if (allow_panorama) {
    cmd->add_option("--panorama", in.panorama, "Range PNG written by `project`");
    cmd->add_option("--ambient", in.ambient, "Ambient PNG matching --panorama");
  }
  cmd->add_option("--stem", in.stem, "Base name for output files");
  cmd->add_flag("--euclidean-range", in.euclidean, "Store 3D range instead of horizontal range");
  cmd->add_option("--workers", in.workers, "Projection partitions")->check(CLI::Range(1u, 64u));
}

int cmd_project(const InputFlags& in, const SharedFlags& shared, std::ostream& out) {
  if (in.input.empty()) throw ConfigError("project requires --input");
  const auto loaded = load_panorama(in, shared.intrinsics);
  const fs::path dir = shared.out.empty() ? fs::path(".") : fs::path(shared.out);
  ensure_dir(dir);
  const auto files = write_panorama(loaded.panorama, dir, default_stem(in));

  const auto px = loaded.panorama.range.pixels();
  const double max_range = px.empty() ? 0.0 : *std::max_element(px.begin(), px.end());
  out << "points: " << loaded.parse->records << "\n"
      << "malformed: " << loaded.parse->malformed << "\n"
      << "projected: " << loaded.stats->projected << "\n"
      << "out_of_fov: " << loaded.stats->out_of_fov << "\n"
      << "degenerate: " << loaded.stats->degenerate << "\n"
      << "max_range_m: " << max_range << "\n";
  for (const auto& f : files) out << "wrote: " << f.string() << "\n";
  return kOk;
}

int cmd_segment(const InputFlags& in, const SharedFlags& shared, std::ostream& out) {
  const auto loaded = load_panorama(in, shared.intrinsics);
  const fs::path dir = shared.out.empty() ? fs::path(".") : fs::path(shared.out);
  ensure_dir(dir);
  const auto stem = default_stem(in);
  for (const auto& seg : split_panorama(loaded.panorama)) {
    const auto path = dir / (stem + "_" + std::string(to_string(seg.label)) + ".png");
    write_png(display_channel(seg.image), path);
    out << "wrote: " << path.string() << "\n";
  }
  return kOk;
}

int cmd_analyze(const InputFlags& in, const SharedFlags& shared, const ConfigLayer& flags, const EnvLookup& env,
                std::ostream& out, std::ostream& err) {
  std::optional<fs::path> config_file;
  if (!shared.config.empty()) config_file = shared.config;
  const auto config = resolve_config(flags, env, config_file);
  config.validate();

  std::unique_ptr<Backend> backend;
  if (config.backend == BackendKind::Mock) {
    backend = std::make_unique<MockBackend>(MockBackend::from_file(config.fixture));
  } else {
    RemoteBackend::Options opts;
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(config.timeout_s * 1000.0));
    backend = std::make_unique<RemoteBackend>(config.endpoint, opts);
  }

  const auto loaded = load_panorama(in, config.intrinsics.string());
  const auto& pano = loaded.panorama;
  const auto segments = split_panorama(pano);

  AnalyzeOptions analyze_opts;
  analyze_opts.prompt = config.prompt;
  const auto analyses = analyze_segments(segments, *backend, analyze_opts);
  std::array<std::vector<LocalizedObject>, 4> objects;
  for (std::size_t i = 0; i < analyses.size(); ++i) objects[i] = localize(analyses[i], pano);

  const auto stem = default_stem(in);
  const auto scene = merge_scene(analyses, objects, stem, pano.width(), pano.height());

  ensure_dir(config.out_dir);
  if (config.emit.scene_json) {
    const auto path = config.out_dir / "scene.json";
    write_text(path, render_scene_json(scene));
    out << "wrote: " << path.string() << "\n";
  }
  if (config.emit.merged_text) {
    const auto path = config.out_dir / "merged.txt";
    write_text(path, scene.merged_text + "\n");
    out << "wrote: " << path.string() << "\n";
  }
  if (config.emit.segment_pngs) {
    for (const auto& seg : segments) {
      const auto path = config.out_dir / (stem + "_" + std::string(to_string(seg.label)) + ".png");
      write_png(display_channel(seg.image), path);
      out << "wrote: " << path.string() << "\n";
    }
  }
  if (config.emit.annotated_panorama) {
    const auto path = config.out_dir / (stem + "_annotated.png");
    write_png(annotate_panorama(display_channel(pano), scene), path);
    out << "wrote: " << path.string() << "\n";
  }
  for (const auto& w : scene.warnings) err << "warning: " << w << "\n";
  out << "warnings: " << scene.warnings.size() << "\n";

  const bool protocol_failure = std::any_of(analyses.begin(), analyses.end(), [](const auto& a) {
    return a.status == AnalysisStatus::ProtocolError;
  });
  const bool any_failure = std::any_of(analyses.begin(), analyses.end(), [](const auto& a) { return a.failed(); });
  if (protocol_failure) return kProtocolError;
  if (config.strict && any_failure) return kStrictBackendFailure;
  return kOk;
}

int cmd_annotate(const std::string& panorama, const std::string& scene_path, const SharedFlags& shared,
                 std::ostream& out) {
  if (panorama.empty() || scene_path.empty()) throw ConfigError("annotate requires --panorama and --scene");
  const auto image = read_png(panorama);
  std::ifstream f(scene_path);
  if (!f) throw FileNotFound("cannot open " + scene_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw FormatMismatch(scene_path + ": " + e.what());
  }
  const auto scene = scene_from_json(j);
  const auto annotated = annotate_panorama(image, scene);

  fs::path target = shared.out.empty() ? fs::path(".") : fs::path(shared.out);
  if (target.extension() != ".png") {
    ensure_dir(target);
    auto stem = fs::path(panorama).stem().string();
    target /= stem + "_annotated.png";
  } else if (target.has_parent_path()) {
    ensure_dir(target.parent_path());
  }
  write_png(annotated, target);
  out << "wrote: " << target.string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Panoramic LiDAR scene description: projection, segmentation, localization, fusion"};
  app.require_subcommand(1);

  SharedFlags shared;
  InputFlags in;
  std::string annotate_panorama_path, annotate_scene;
  ConfigLayer flags;
  std::string prompt;

  auto add_shared = [&](CLI::App* cmd, bool backend_flags) {
    cmd->add_option("--intrinsics", shared.intrinsics, "Intrinsics TOML (default: os1-128)");
    cmd->add_option("--out,-o", shared.out, "Output directory");
    if (backend_flags) {
      cmd->add_option("--backend", shared.backend, "mock | remote");
      cmd->add_option("--endpoint", shared.endpoint, "Remote backend URL");
      cmd->add_option("--fixture", shared.fixture, "Mock backend fixture JSON");
      cmd->add_option("--timeout", shared.timeout, "Per-request timeout in seconds");
      cmd->add_flag("--strict", shared.strict, "Exit 4 when any segment fails");
      cmd->add_option("--config", shared.config, "Run config TOML");
      cmd->add_option("--prompt", prompt, "Free-text detection prompt passed to the backend");
    }
  };

  auto* project = app.add_subcommand("project", "Rasterize a point cloud into panorama PNGs");
  add_input_flags(project, in, false);
  add_shared(project, false);

  auto* segment = app.add_subcommand("segment", "Write the four 90 degree segment images");
  add_input_flags(segment, in, true);
  add_shared(segment, false);

  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline and write scene.json");
  add_input_flags(analyze, in, true);
  add_shared(analyze, true);
  bool emit_segments = false, emit_annotated = false, no_text = false;
  analyze->add_flag("--emit-segments", emit_segments, "Also write segment PNGs");
  analyze->add_flag("--emit-annotated", emit_annotated, "Also write an annotated panorama PNG");
  analyze->add_flag("--no-merged-text", no_text, "Skip merged.txt");

  auto* annotate = app.add_subcommand("annotate", "Draw scene boxes and range/angle tags onto a panorama");
  annotate->add_option("--panorama", annotate_panorama_path, "16-bit or 8-bit grayscale panorama PNG");
  annotate->add_option("--scene", annotate_scene, "scene.json from `analyze`");
  annotate->add_option("--out,-o", shared.out, "Output PNG path or directory");

  std::vector<const char*> argv{"panolidar"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (*project) return cmd_project(in, shared, out);
    if (*segment) return cmd_segment(in, shared, out);
    if (*annotate) return cmd_annotate(annotate_panorama_path, annotate_scene, shared, out);

    if (!shared.intrinsics.empty()) flags.intrinsics = shared.intrinsics;
    if (!shared.backend.empty()) {
      flags.backend = parse_backend_kind(shared.backend);
      if (!flags.backend) throw ConfigError("--backend must be mock or remote");
    }
    if (!shared.endpoint.empty()) flags.endpoint = shared.endpoint;
    if (!shared.fixture.empty()) flags.fixture = shared.fixture;
    if (shared.timeout) {
      if (!(*shared.timeout > 0.0)) throw ConfigError("--timeout must be positive");
      flags.timeout_s = shared.timeout;
    }
    if (!shared.out.empty()) flags.out_dir = shared.out;
    if (shared.strict) flags.strict = true;
    if (!prompt.empty()) flags.prompt = prompt;
    if (emit_segments) flags.emit_segment_pngs = true;
    if (emit_annotated) flags.emit_annotated_panorama = true;
    if (no_text) flags.emit_merged_text = false;
    return cmd_analyze(in, shared, flags, env, out, err);
  } catch (const FileNotFound& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
}

}  // namespace panolidar::cli
