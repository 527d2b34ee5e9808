// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "panolidar/backend.hpp"
#include "panolidar/cli.hpp"
#include "panolidar/fusion.hpp"
#include "panolidar/localization.hpp"
#include "panolidar/projection.hpp"
#include "panolidar/segmentation.hpp"
#include "panolidar/testkit/oracle.hpp"
#include "panolidar/testkit/synthetic.hpp"

using namespace panolidar;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PANOLIDAR_FIXTURES;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SensorIntrinsics sized(int w, int h) {
  auto intr = SensorIntrinsics::os1_128();
  intr.width = w;
  intr.height = h;
  return intr;
}

double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

Outcome angle_formula() {
  const auto intr = SensorIntrinsics::os1_128();
  double worst = 0.0;
  for (int u = 0; u < intr.width; ++u) {
    const double exact = 360.0 * (u - 1024) / 2048.0;  // dyadic, exact in binary
    worst = std::max(worst, std::abs(azimuth_of_column(u, intr) - exact));
  }
  const double at_center = azimuth_of_column(1024, intr);
  const double at_left = azimuth_of_column(0, intr);
  const bool pass = std::abs(at_center) <= 1e-9 && std::abs(at_left + 180.0) <= 1e-9 && worst <= 1e-9;
  return {pass, fmt("u=W/2 -> %.12g deg, u=0 -> %.12g deg, max deviation over all columns %.3g", at_center, at_left, worst)};
}

Outcome street_labels() {
  const std::vector<std::pair<double, SegmentLabel>> cases{{-101.7, SegmentLabel::Left},
                                                           {-29.8, SegmentLabel::Front},
                                                           {-17.75, SegmentLabel::Front},
                                                           {-176.5, SegmentLabel::Back}};
  std::string detail;
  bool pass = true;
  for (const auto& [theta, want] : cases) {
    const auto got = segment_of_azimuth(theta);
    pass &= got == want;
    detail += fmt("%g", theta) + "->" + std::string(to_string(got)) + " ";
  }
  return {pass, detail};
}

Outcome projection_round_trip() {
  const auto intr = SensorIntrinsics::os1_128();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> az(-180.0, 180.0), el(-22.4, 22.4), range(0.5, 100.0);
  PointCloud cloud;
  std::vector<double> truth_az, truth_el, truth_r;
  for (int i = 0; i < 10000; ++i) {
    const double r = range(rng), a = az(rng), e = el(rng);
    cloud.points.push_back(testkit::point_at(r, a, e));
    truth_r.push_back(r);
    truth_az.push_back(a);
    truth_el.push_back(e);
  }
  const auto result = project_cloud(cloud, intr);
  std::map<std::pair<int, int>, double> nearest;  // pixel -> smallest true range
  std::size_t ok = 0;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto px = pixel_of_point(cloud.points[i], intr);
    if (!px) continue;
    const bool az_ok = angle_gap(azimuth_of_column(px->u, intr), truth_az[i]) <= 360.0 / intr.width;
    const bool el_ok = std::abs(elevation_of_row(px->v, intr) - truth_el[i]) <=
                       (intr.elevation_max_deg - intr.elevation_min_deg) / intr.height;
    if (az_ok && el_ok) ++ok;
    auto [it, fresh] = nearest.emplace(std::pair{px->u, px->v}, truth_r[i]);
    if (!fresh) it->second = std::min(it->second, truth_r[i]);
  }
  std::size_t range_ok = 0;
  for (const auto& [uv, r] : nearest) range_ok += result.panorama.range(uv.first, uv.second) == r;
  const bool pass = ok == cloud.points.size() && range_ok == nearest.size() && result.stats.projected == 10000;
  return {pass, std::to_string(ok) + "/10000 angles within one pixel, " + std::to_string(range_ok) + "/" +
                    std::to_string(nearest.size()) + " occupied pixels hold the exact horizontal range"};
}

Outcome oracle_equivalence() {
  const auto intr = SensorIntrinsics::os1_128();
  int equal = 0;
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_real_distribution<double> d(-40.0, 40.0), z(-12.0, 12.0);
    std::uniform_int_distribution<int> ch(0, 65535);
    PointCloud cloud;
    for (int i = 0; i < 900; ++i) {
      Point3 p{d(rng), d(rng), z(rng), static_cast<std::uint16_t>(ch(rng)), {}, {}};
      cloud.points.push_back(p);
    }
    // Same-pixel collisions at closer and equal range.
    for (int i = 0; i < 100; ++i) {
      auto p = cloud.points[static_cast<std::size_t>(i)];
      if (i % 2) p.x *= 0.5, p.y *= 0.5, p.z *= 0.5;
      p.ambient = static_cast<std::uint16_t>(ch(rng));
      cloud.points.push_back(p);
    }
    equal += project_cloud(cloud, intr).panorama == testkit::oracle_project(cloud, intr);
  }
  return {equal == 50, std::to_string(equal) + "/50 clouds of 1000 points bit-identical to the oracle"};
}

Outcome segment_partition() {
  bool pass = true;
  std::string detail;
  for (int w : {8, 64, 2048}) {
    const auto intr = sized(w, 4);
    std::vector<int> hits(static_cast<std::size_t>(w), 0);
    for (const auto label : kSegmentOrder) {
      for (int u = 0; u < w / 4; ++u) ++hits[static_cast<std::size_t>(to_panorama_coords(label, {u, 0}, intr).u)];
    }
    const bool exact = std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
    pass &= exact;
    detail += "W=" + std::to_string(w) + (exact ? " partitioned; " : " NOT partitioned; ");
  }
  // W = 64: every segment pixel maps to a panorama pixel holding the same value and back.
  const auto intr = sized(64, 16);
  auto pano = PanoramaImage::blank(intr);
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 64; ++u) pano.range(u, v) = 1.0 + u + 100.0 * v;
  }
  const auto segments = split_panorama(pano);
  std::size_t checked = 0, round_trips = 0;
  for (const auto& seg : segments) {
    for (int v = 0; v < seg.height(); ++v) {
      for (int u = 0; u < seg.width(); ++u) {
        const auto p = to_panorama_coords(seg.label, {u, v}, intr);
        const int back = ((p.u - segment_start(seg.label, 64)) % 64 + 64) % 64;
        ++checked;
        round_trips += back == u && p.v == v && seg.image.range(u, v) == pano.range(p.u, p.v);
      }
    }
  }
  pass &= checked == 64u * 16u && round_trips == checked;
  detail += std::to_string(round_trips) + "/" + std::to_string(checked) + " W=64 segment pixels round-trip";
  return {pass, detail};
}

Outcome synthetic_localization() {
  const auto intr = SensorIntrinsics::os1_128();
  struct Truth {
    SegmentLabel segment;
    double range;
    double azimuth;
    double elevation;
  };
  const std::vector<Truth> truths{{SegmentLabel::Left, 4.9, -101.7, -5.0},
                                  {SegmentLabel::Front, 11.0, -17.75, -1.0},
                                  {SegmentLabel::Right, 7.3, 63.2, 2.5},
                                  {SegmentLabel::Back, 0.8, -176.5, -9.3}};
  testkit::SyntheticScene scene;
  scene.seed = 77;
  for (const auto& t : truths) {
    scene.placements.push_back({std::string(to_string(t.segment)), t.range, t.azimuth, t.elevation, 1500, 0.4, 1000});
  }
  const auto pano = project_cloud(testkit::generate_cloud(scene, intr), intr).panorama;

  // Mock boxes centered on the column nearest each bearing and the row of its elevation.
  nlohmann::json fixture = nlohmann::json::object();
  for (const auto& t : truths) {
    const int u = ((static_cast<int>(std::lround(intr.width * t.azimuth / 360.0)) + intr.width / 2) % intr.width +
                   intr.width) % intr.width;
    const int v = *row_of_elevation(t.elevation, intr);
    const int u_seg = ((u - segment_start(t.segment, intr.width)) % intr.width + intr.width) % intr.width;
    const auto key = std::string(to_string(t.segment));
    fixture[key] = {{"caption", "an object"},
                    {"detections", {{{"label", key}, {"bbox", {u_seg - 6, v - 3, u_seg + 7, v + 4}}, {"score", 1.0}}}}};
  }
  auto mock = MockBackend::from_json(fixture);
  const auto analyses = analyze_segments(split_panorama(pano), mock);

  int good = 0;
  std::string detail;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto objs = localize(analyses[i], pano);
    const auto it = std::find_if(truths.begin(), truths.end(), [&](const Truth& t) { return t.segment == analyses[i].label; });
    if (objs.size() != 1 || it == truths.end()) continue;
    const auto& o = objs[0];
    const bool ok = o.range_m == it->range && angle_gap(o.azimuth_deg, it->azimuth) <= 180.0 / intr.width &&
                    o.segment == it->segment && segment_of_azimuth(o.azimuth_deg) == it->segment &&
                    o.label == std::string(to_string(it->segment)) && o.range_source == RangeSource::CenterPixel;
    good += ok;
    detail += std::string(to_string(o.segment)) + fmt(" %.4g m @ %.4f deg; ", o.range_m.value_or(-1.0), o.azimuth_deg);
  }
  return {good == 4, std::to_string(good) + "/4 exact: " + detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome fusion_golden() {
  const auto street = kFixtures / "street";
  std::vector<std::string> scenes;
  for (const auto* run : {"a", "b"}) {
    const auto out = fs::temp_directory_path() / (std::string("panolidar_acceptance_") + run);
    fs::remove_all(out);
    std::ostringstream sink, errs;
    const int code = cli::run({"analyze", "-i", (street / "street.csv").string(), "--config", (street / "run.toml").string(),
                               "-o", out.string()},
                              sink, errs, [](const std::string&) { return std::nullopt; });
    if (code != 0) return {false, "analyze exited " + std::to_string(code) + ": " + errs.str()};
    scenes.push_back(slurp(out / "scene.json"));
  }
  const auto scene = nlohmann::json::parse(scenes[0]);
  const auto text = scene.at("merged_text").get<std::string>();
  int prefixes = 0;
  for (const auto label : kSegmentOrder) prefixes += text.find(directional_prefix(label)) != std::string::npos;
  const bool person = text.find("a person (4.9[m], -101.7\xC2\xB0) walking") != std::string::npos;
  const bool identical = scenes[0] == scenes[1];
  const bool golden = scenes[0] == slurp(kFixtures / "golden" / "street_scene.json");
  return {prefixes == 4 && person && identical && golden,
          std::to_string(prefixes) + "/4 prefixes, person annotation " + (person ? "present" : "missing") +
              ", runs " + (identical ? "byte-identical" : "differ") + ", golden " + (golden ? "matches" : "differs")};
}

Outcome fallback_behavior() {
  const auto intr = sized(64, 16);
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> range(0.5, 80.0);
  std::uniform_real_distribution<double> density(0.01, 0.3);
  std::uniform_int_distribution<int> start(0, 8), extent(1, 4);
  int fallback_ok = 0, empty_ok = 0, found = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto pano = PanoramaImage::blank(intr);
    std::bernoulli_distribution hit(density(rng));
    for (auto& p : pano.range.pixels()) p = hit(rng) ? range(rng) : 0.0;
    const auto label = kSegmentOrder[static_cast<std::size_t>(trial % 4)];
    const int u0 = start(rng), v0 = start(rng);
    const BBox box{u0, v0, u0 + 2 * extent(rng), v0 + 2 * extent(rng)};
    const auto c = to_panorama_coords(label, bbox_center(box), intr);
    pano.range(c.u, c.v) = 0.0;

    const auto got = object_range(pano, label, box);
    const auto want = testkit::oracle_object_range(pano, label, box);
    const auto want_source = want ? RangeSource::NearestValidInBBox : RangeSource::Unavailable;
    fallback_ok += got.range_m == want && got.source == want_source;
    found += got.range_m.has_value();

    for (int v = box.v0; v < box.v1; ++v) {
      for (int u = box.u0; u < box.u1; ++u) {
        const auto p = to_panorama_coords(label, {u, v}, intr);
        pano.range(p.u, p.v) = 0.0;
      }
    }
    const auto none = object_range(pano, label, box);
    empty_ok += !none.range_m && none.source == RangeSource::Unavailable;
  }
  return {fallback_ok == 1000 && empty_ok == 1000,
          std::to_string(fallback_ok) + "/1000 ring fallbacks match the oracle (" + std::to_string(found) + " found a return), " + std::to_string(empty_ok) +
              "/1000 all-sentinel boxes report no range"};
}

Outcome performance_floor() {
  const auto intr = SensorIntrinsics::os1_128();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-60.0, 60.0), z(-8.0, 8.0);
  PointCloud cloud;
  cloud.points.reserve(1'000'000);
  for (int i = 0; i < 1'000'000; ++i) cloud.points.push_back({d(rng), d(rng), z(rng), {}, {}, {}});
  double best = INFINITY;
  std::size_t projected = 0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = project_cloud(cloud, intr);  // single worker
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, s);
    projected = result.stats.projected;
  }
  return {best < 1.0, fmt("1e6 points -> 2048x128 in %.3f s (best of 3, 1 worker, must be < 1 s), %.0f projected", best,
                          static_cast<double>(projected))};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "angle formula fidelity", 1.0, angle_formula},
      {2, "reported bearing labels", 1.0, street_labels},
      {3, "projection round-trip", 5.0, projection_round_trip},
      {4, "oracle equivalence", 30.0, oracle_equivalence},
      {5, "segment partition and wraparound", 10.0, segment_partition},
      {6, "end-to-end synthetic localization", 10.0, synthetic_localization},
      {7, "fusion golden", 60.0, fusion_golden},
      {8, "range fallback", 10.0, fallback_behavior},
      {9, "performance floor", 60.0, performance_floor},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && s < c.limit_s;
    failures += !pass;
    std::printf("criterion %d [%s] %s (%.2f s, limit %.0f s): %s\n", c.id, pass ? "PASS" : "FAIL", c.name, s,
                c.limit_s, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
