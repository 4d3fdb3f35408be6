// End-to-end checks against the installed binary (path injected at compile
// time as SPECCAM_BIN).
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "speccam/io.hpp"
#include "speccam/phantom.hpp"

using namespace speccam;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + (env.empty() ? "" : " ") + std::string(SPECCAM_BIN) + " " + args +
      " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("speccam_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("simulate is deterministic in the seed and validates n") {
  TempDir tmp;
  CHECK(run("--seed 7 simulate --n 30 --out " + tmp / "a.csv") == 0);
  CHECK(run("--seed 7 simulate --n 30 --out " + tmp / "b.csv") == 0);
  CHECK(run("--seed 8 simulate --n 30 --out " + tmp / "c.csv") == 0);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  CHECK(slurp(tmp / "a.csv") != slurp(tmp / "c.csv"));

  CHECK(run("simulate --n 10 --out " + tmp / "small.csv") == 2);
}

TEST_CASE("calibrate reports io failures and bad layout distinctly") {
  TempDir tmp;
  // missing chart file
  CHECK(run("calibrate --chart " + tmp / "nope.csv" + " --image " +
            tmp / "nope.ppm" + " --device d") == 3);

  const ColorChart chart = make_synthetic_chart("chart24", 24, 201);
  write_chart_csv(chart, tmp / "chart.csv");
  CameraModel camera;
  const ChartScene scene = generate_chart_scene(chart, camera);
  write_ppm(scene.image, tmp / "scene.ppm");

  CHECK(run("calibrate --chart " + tmp / "chart.csv" + " --image " +
            tmp / "scene.ppm" + " --device d --layout bogus --out " +
            tmp / "p.json") == 2);
}

TEST_CASE("calibrate, reconstruct and extract chain together") {
  TempDir tmp;
  const ColorChart chart = make_synthetic_chart("chart24", 24, 202);
  write_chart_csv(chart, tmp / "chart.csv");
  CameraModel camera;  // noiseless
  const ChartScene scene = generate_chart_scene(chart, camera);
  write_ppm(scene.image, tmp / "scene.ppm");

  const std::string profile = tmp / "phone.profile.json";
  CHECK(run("calibrate --chart " + tmp / "chart.csv" + " --image " +
            tmp / "scene.ppm" + " --device phone --out " + profile) == 0);
  CHECK(fs::exists(profile));

  CHECK(run("reconstruct --profile " + profile + " --image " +
            tmp / "scene.ppm" + " --out " + tmp / "scene.msc") == 0);
  const SpectralCube cube = read_cube(tmp / "scene.msc");
  CHECK(cube.width() == scene.image.width);
  CHECK(cube.height() == scene.image.height);
  CHECK(cube.grid().size() == 27);

  // extract against a cube with known content
  SpectralCube flat(60, 40, WavelengthGrid::default_grid());
  for (double& v : flat.data()) v = 0.5;
  write_cube(flat, tmp / "flat.msc");
  {
    std::ofstream rois(tmp / "rois.csv");
    rois << "snapshot_id,x,y,side\nsnapA,0,0,20\nsnapA,30,10,20\nsnapB,5,5,"
            "20\n";
  }
  CHECK(run("extract --cube " + tmp / "flat.msc" + " --rois " +
            tmp / "rois.csv" + " --out " + tmp / "spectra.csv") == 0);
  std::ifstream in(tmp / "spectra.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.substr(0, 32) == "snapshot_id,x,y,side,status,s420");
  std::string last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  CHECK(last.substr(0, 20) == "aggregate,,,,3-of-3,");
  CHECK(last.find(",0.5") != std::string::npos);

  // out-of-bounds roi fails with the domain exit code
  {
    std::ofstream rois(tmp / "bad_rois.csv");
    rois << "snapshot_id,x,y,side\nsnapA,50,30,20\n";
  }
  CHECK(run("extract --cube " + tmp / "flat.msc" + " --rois " +
            tmp / "bad_rois.csv" + " --out " + tmp / "unused.csv") == 2);
}

TEST_CASE("profile store honors SPECCAM_PROFILE_DIR") {
  TempDir tmp;
  const ColorChart chart = make_synthetic_chart("chart24", 24, 203);
  write_chart_csv(chart, tmp / "chart.csv");
  CameraModel camera;
  const ChartScene scene = generate_chart_scene(chart, camera);
  write_ppm(scene.image, tmp / "scene.ppm");

  const std::string env = "SPECCAM_PROFILE_DIR=" + tmp / "store";
  fs::create_directories(tmp / "store");
  CHECK(run("calibrate --chart " + tmp / "chart.csv" + " --image " +
            tmp / "scene.ppm" + " --device pixel9", env) == 0);
  CHECK(fs::exists(tmp / "store/pixel9.profile.json"));

  // reconstruct by stored device name
  CHECK(run("reconstruct --profile pixel9 --image " + tmp / "scene.ppm" +
            " --out " + tmp / "cube.msc", env) == 0);
  CHECK(fs::exists(tmp / "cube.msc"));

  // unknown device is a domain error
  CHECK(run("reconstruct --profile nosuch --image " + tmp / "scene.ppm" +
            " --out " + tmp / "cube2.msc", env) == 2);
}

TEST_CASE("evaluate writes a parseable report") {
  TempDir tmp;
  REQUIRE(run("--seed 11 simulate --n 40 --out " + tmp / "ds.csv") == 0);
  CHECK(run("--seed 11 evaluate --dataset " + tmp / "ds.csv" +
            " --mode sal --model knn --folds 5 --out " + tmp / "report.json") ==
        0);
  const auto j = nlohmann::json::parse(slurp(tmp / "report.json"));
  CHECK(j["mode"] == "sal");
  CHECK(j["model"] == "knn");
  CHECK(j["folds"] == 5);
  CHECK(j["n"] == 40);
  CHECK(j["agreement"].contains("r"));
  CHECK(j["agreement"].contains("loa_upper"));
  CHECK(j["roc"]["threshold"].get<double>() == doctest::Approx(17.1));
  const double auroc = j["roc"]["auroc"].get<double>();
  CHECK(auroc >= 0.0);
  CHECK(auroc <= 1.0);

  CHECK(run("evaluate --dataset " + tmp / "ds.csv" +
            " --mode bogus --out " + tmp / "r2.json") == 2);
  CHECK(run("evaluate --dataset " + tmp / "missing.csv" + " --out " +
            tmp / "r3.json") == 3);
}

TEST_CASE("learning-curve runs a single fraction end to end") {
  TempDir tmp;
  REQUIRE(run("--seed 12 simulate --n 40 --out " + tmp / "ds.csv") == 0);
  CHECK(run("--seed 12 learning-curve --dataset " + tmp / "ds.csv" +
            " --from 1.0 --to 1.0 --folds 5 --out " + tmp / "curve.csv") == 0);
  std::ifstream in(tmp / "curve.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "mode,fraction,n,r,md,std_md");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);

  CHECK(run("learning-curve --dataset " + tmp / "ds.csv" +
            " --from 2.0 --out " + tmp / "c2.csv") == 2);
}
