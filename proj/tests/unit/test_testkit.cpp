#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "panolidar/projection.hpp"
#include "panolidar/testkit/oracle.hpp"
#include "panolidar/testkit/synthetic.hpp"
#include "panolidar/toml_lite.hpp"

using namespace panolidar;
using namespace panolidar::testkit;

TEST(PointAt, HorizontalRangeIsExact) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> r(0.3, 120.0), az(-180.0, 180.0), el(-22.0, 22.0);
  for (int i = 0; i < 20000; ++i) {
    const double range = std::round(r(rng) * 100.0) / 100.0;
    const double a = az(rng);
    const auto p = point_at(range, a, el(rng));
    ASSERT_EQ(horizontal_range(p), range) << range << " " << a;
    EXPECT_NEAR(azimuth_of_point(p), a, 1e-9);
  }
}

TEST(GenerateCloud, DeterministicAndOnBearing) {
  SyntheticScene scene;
  scene.seed = 9;
  scene.placements.push_back({"person", 4.9, -101.7, 0.0, 30, 0.3, 500});
  scene.placements.push_back({"car", 0.8, -176.5, -5.0, 10, 0.5, 0});
  const auto intr = SensorIntrinsics::os1_128();
  const auto a = generate_cloud(scene, intr);
  const auto b = generate_cloud(scene, intr);
  EXPECT_EQ(a.points, b.points);
  ASSERT_EQ(a.points.size(), 40u);
  EXPECT_NEAR(azimuth_of_point(a.points[0]), -101.7, 1e-9);
  EXPECT_EQ(a.points[0].ambient, 500);
  EXPECT_FALSE(a.points[30].ambient);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_EQ(horizontal_range(a.points[i]), 4.9);
    EXPECT_LE(std::abs(azimuth_of_point(a.points[i]) + 101.7), 0.3 + 1e-9);
  }
  scene.seed = 10;
  EXPECT_NE(generate_cloud(scene, intr).points, a.points);
}

TEST(GenerateCloud, RejectsOutOfFov) {
  SyntheticScene scene;
  scene.placements.push_back({"bird", 3.0, 0.0, 40.0, 1, 0.0, 0});
  EXPECT_THROW(generate_cloud(scene, SensorIntrinsics::os1_128()), PlacementOutOfFov);
}

TEST(SceneToml, Parses) {
  const auto scene = scene_from_toml(parse_toml(R"(
seed = 4
[[placement]]
label = "person"
range = 4.9
azimuth = -101.7
points = 12
jitter = 0.2
ambient = 800
)"));
  EXPECT_EQ(scene.seed, 4u);
  ASSERT_EQ(scene.placements.size(), 1u);
  EXPECT_EQ(scene.placements[0].label, "person");
  EXPECT_EQ(scene.placements[0].points, 12);
  EXPECT_EQ(scene.placements[0].elevation_deg, 0.0);
  EXPECT_EQ(scene.placements[0].ambient, 800);
}

TEST(GenerateCloud, AxisPlacements) {
  SyntheticScene scene;
  scene.placements.push_back({"ahead", 5.0, 0.0, 0.0, 1, 0.0, 0});
  scene.placements.push_back({"left", 5.0, -90.0, 0.0, 1, 0.0, 0});
  const auto cloud = generate_cloud(scene, SensorIntrinsics::os1_128());
  ASSERT_EQ(cloud.points.size(), 2u);
  EXPECT_EQ(cloud.points[0].x, 5.0);
  EXPECT_EQ(cloud.points[0].y, 0.0);
  EXPECT_EQ(cloud.points[0].z, 0.0);
  EXPECT_NEAR(cloud.points[1].x, 0.0, 1e-12);
  EXPECT_NEAR(cloud.points[1].y, 5.0, 1e-12);
  EXPECT_NEAR(azimuth_of_point(cloud.points[1]), -90.0, 1e-9);
}

TEST(OracleProject, EmptyAndDuplicate) {
  const auto intr = SensorIntrinsics::os1_128();
  const auto empty = oracle_project({}, intr);
  EXPECT_EQ(empty, PanoramaImage::blank(intr));
  PointCloud one, two;
  one.points = {{3, 4, 0, {}, {}, {}}};
  two.points = {{3, 4, 0, {}, {}, {}}, {3, 4, 0, {}, {}, {}}};
  EXPECT_EQ(oracle_project(two, intr), oracle_project(one, intr));
  EXPECT_EQ(project_cloud(two, intr).panorama, oracle_project(one, intr));
}
