// Writes the cloud for a synthetic scene TOML as CSV. Used to regenerate fixtures.
#include <CLI11.hpp>

#include <iostream>

#include "panolidar/testkit/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic point cloud generator"};
  std::string scene_path, intrinsics_path, out_path;
  app.add_option("scene", scene_path, "Scene TOML")->required();
  app.add_option("--intrinsics", intrinsics_path, "Intrinsics TOML");
  app.add_option("--out,-o", out_path, "Output CSV")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    const auto intr = intrinsics_path.empty() ? panolidar::SensorIntrinsics::os1_128()
                                              : panolidar::load_intrinsics(intrinsics_path);
    const auto cloud = panolidar::testkit::generate_cloud(panolidar::testkit::load_scene(scene_path), intr);
    panolidar::write_csv(cloud, out_path);
    std::cout << "points: " << cloud.size() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
