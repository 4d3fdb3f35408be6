// speccam: color-chart calibration, RGB -> multispectral reconstruction,
// synthetic phantom datasets, SAL/RGBL regression and evaluation.
#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "plot_svg.hpp"
#include "speccam/error.hpp"
#include "speccam/evaluation.hpp"
#include "speccam/io.hpp"
#include "speccam/phantom.hpp"
#include "speccam/reconstruction.hpp"
#include "speccam/stats.hpp"

namespace fs = std::filesystem;
using namespace speccam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

fs::path profile_store_dir() {
  if (const char* dir = std::getenv("SPECCAM_PROFILE_DIR")) return dir;
  return fs::path("profiles");
}

ChartLayout parse_layout(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos)
    throw BadRange("layout must look like 6x4 or 12x8");
  ChartLayout layout;
  layout.cols = static_cast<std::size_t>(std::stoul(text.substr(0, x)));
  layout.rows = static_cast<std::size_t>(std::stoul(text.substr(x + 1)));
  if (layout.cols == 0 || layout.rows == 0)
    throw BadRange("layout dimensions must be positive");
  return layout;
}

ModelSpec make_spec(const std::string& model, std::uint64_t seed) {
  ModelSpec spec;
  spec.seed = seed;
  if (model == "hybrid")
    spec.kind = ModelKind::Hybrid;
  else if (model == "ann")
    spec.kind = ModelKind::Mlp;
  else if (model == "svr")
    spec.kind = ModelKind::Svr;
  else if (model == "knn")
    spec.kind = ModelKind::Knn;
  else if (model == "rf")
    spec.kind = ModelKind::Rf;
  else
    throw BadHyperparameter("unknown model '" + model + "'");
  return spec;
}

std::string iso8601_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  return buf;
}

int cmd_calibrate(const std::string& chart_path, const std::string& image_path,
                  const std::string& layout_text, const std::string& device,
                  const std::string& out_path, double margin, bool strict) {
  const ColorChart chart = read_chart_csv(chart_path);
  const RgbImage image = read_ppm(image_path);
  const ChartLayout layout = parse_layout(layout_text);
  ChartSamples samples = sample_chart(image, layout, margin, chart.name);

  bool exposure_problem = false;
  for (const auto& [block_id, verdict] : validate_exposure(samples)) {
    if (verdict == ExposureVerdict::Ok) continue;
    exposure_problem = true;
    std::cerr << "warning: block " << block_id << " is "
              << (verdict == ExposureVerdict::Overexposed ? "overexposed"
                                                          : "underexposed")
              << "\n";
  }
  if (strict && exposure_problem)
    throw BadRange("exposure check failed under --strict");

  DeviceProfile profile;
  profile.device_model = device;
  profile.illuminant = "unspecified";
  profile.chart_name = chart.name;
  profile.tm = wiener_tm(samples, chart);
  profile.created_at = iso8601_now();

  if (out_path.empty()) {
    save_profile(profile, profile_store_dir());
    std::cout << "profile stored for device " << device << " in "
              << profile_store_dir().string() << "\n";
  } else {
    const fs::path out(out_path);
    save_profile(profile, out.parent_path().empty() ? fs::path(".")
                                                    : out.parent_path());
    const fs::path written =
        (out.parent_path().empty() ? fs::path(".") : out.parent_path()) /
        (device + ".profile.json");
    if (written != out) fs::rename(written, out);
    std::cout << "profile written to " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_reconstruct(const std::string& profile_path,
                    const std::string& image_path, const std::string& out_path) {
  DeviceProfile profile;
  if (fs::exists(profile_path)) {
    const fs::path p(profile_path);
    std::string model = p.filename().string();
    const std::string suffix = ".profile.json";
    if (model.size() > suffix.size() &&
        model.substr(model.size() - suffix.size()) == suffix)
      model = model.substr(0, model.size() - suffix.size());
    else
      model = p.stem().string();
    profile = load_profile(model, p.parent_path().empty() ? fs::path(".")
                                                          : p.parent_path());
  } else {
    profile = load_profile(profile_path, profile_store_dir());
  }
  const RgbImage image = read_ppm(image_path);
  const SpectralCube cube = reconstruct_image(profile.tm, image);
  write_cube(cube, out_path);
  const auto [lo, hi] =
      std::minmax_element(cube.data().begin(), cube.data().end());
  std::cout << "cube " << cube.width() << "x" << cube.height() << "x"
            << cube.grid().size() << " reflectance range [" << *lo << ", "
            << *hi << "]\n";
  return kExitOk;
}

int cmd_extract(const std::string& cube_path, const std::string& rois_path,
                const std::string& out_path) {
  const SpectralCube cube = read_cube(cube_path);
  const auto entries = read_roi_csv(rois_path);
  const RoiQualityPolicy policy;

  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].roi.inside(cube.width(), cube.height())) {
      std::ostringstream msg;
      msg << rois_path << " data row " << (i + 1) << " is out of bounds";
      throw RoiOutOfBounds(msg.str());
    }
  }

  // per-snapshot grouping for the mean-of-means aggregate
  std::vector<std::string> snapshot_order;
  std::map<std::string, std::vector<Spectrum>> by_snapshot;
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  out << "snapshot_id,x,y,side,status";
  for (double b : cube.grid().bands()) out << ",s" << static_cast<int>(b);
  out << "\n";

  std::size_t accepted = 0;
  for (const auto& entry : entries) {
    const Spectrum s = extract_roi_spectrum(cube, entry.roi);
    const bool ok =
        check_roi_quality(cube, entry.roi, policy) == RoiVerdict::Accept;
    out << entry.snapshot_id << "," << entry.roi.x << "," << entry.roi.y << ","
        << entry.roi.side << "," << (ok ? "ok" : "rejected");
    for (double v : s.values()) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
    if (ok) {
      if (!by_snapshot.count(entry.snapshot_id))
        snapshot_order.push_back(entry.snapshot_id);
      by_snapshot[entry.snapshot_id].push_back(s);
      ++accepted;
    }
  }
  if (accepted == 0) throw BadRange("all ROIs rejected by the quality policy");

  std::vector<Spectrum> per_snapshot;
  for (const auto& id : snapshot_order)
    per_snapshot.push_back(mean_spectra(by_snapshot[id]));
  const Spectrum aggregate = mean_spectra(per_snapshot);
  out << "aggregate,,,," << accepted << "-of-" << entries.size();
  for (double v : aggregate.values()) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << "," << buf;
  }
  out << "\n";
  std::cout << "extracted " << entries.size() << " ROIs (" << accepted
            << " accepted) to " << out_path << "\n";
  return kExitOk;
}

int cmd_simulate(std::size_t n, std::uint64_t seed, double noise,
                 const std::string& out_path, bool chart_test) {
  if (n < 20) throw BadRange("need --n >= 20 for downstream cross-validation");
  CameraModel camera;
  camera.noise_sigma = noise;
  camera.seed = seed;
  DatasetOptions options;
  options.n = n;
  const SyntheticDataset ds = generate_dataset(options, camera, seed);
  write_dataset_csv(ds, out_path);
  std::cout << "wrote " << ds.records.size() << " records to " << out_path
            << "\n";

  if (chart_test) {
    // calibrate on a rendered 24-block chart, reconstruct the 96-block one
    const ColorChart chart24 = make_synthetic_chart("chart24", 24, seed);
    const ColorChart chart96 =
        make_synthetic_chart("chart96", 96, derive_seed(seed, "chart96"));
    CameraModel noisy = camera;
    noisy.noise_sigma = 1.5;
    const ChartScene scene24 = generate_chart_scene(chart24, noisy);
    const ChartSamples samples =
        sample_chart(scene24.image, scene24.layout, 0.25, chart24.name);
    const TransformationMatrix tm = wiener_tm(samples, chart24);

    CameraModel noisy96 = noisy;
    noisy96.seed = derive_seed(seed, "scene96");
    const ChartScene scene96 = generate_chart_scene(chart96, noisy96);
    const ChartSamples samples96 =
        sample_chart(scene96.image, scene96.layout, 0.25, chart96.name);
    double total = 0.0;
    for (std::size_t i = 0; i < chart96.blocks.size(); ++i)
      total += spectral_rmse(
          reconstruct_pixel(tm, samples96.samples[i].rgb),
          chart96.blocks[i].reflectance);
    const double mean_rmse = total / chart96.blocks.size();
    std::cout << "cross-chart mean RMSE " << mean_rmse << " "
              << (mean_rmse < 0.04 ? "PASS" : "FAIL") << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& dataset_path, const std::string& mode_name,
                 const std::string& model_name, std::size_t folds,
                 std::uint64_t seed, const std::string& out_path,
                 const std::string& plots_dir) {
  const SyntheticDataset ds = read_dataset_csv(dataset_path);
  const FeatureMode mode =
      mode_name == "sal" ? FeatureMode::Sal : FeatureMode::Rgbl;
  if (mode_name != "sal" && mode_name != "rgbl")
    throw BadHyperparameter("mode must be sal or rgbl");
  const ModelSpec spec = make_spec(model_name, seed);
  const TrainingSet ts = dataset_features(ds, mode);
  const auto pairs =
      cross_validated_predictions(ts, spec, folds, derive_seed(seed, "cv"));
  const AgreementReport agreement = bland_altman(pairs);
  const RocReport roc_report = roc(pairs, 17.1);

  const std::string json = report_json(agreement, roc_report, mode_name,
                                       model_name, folds, seed, pairs.size());
  {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    out << json << "\n";
  }
  std::cout << "r=" << agreement.r << " p=" << agreement.p_value
            << " md=" << agreement.md << " loa=[" << agreement.loa_lower << ", "
            << agreement.loa_upper << "] auroc=" << roc_report.auroc << "\n";

  if (!plots_dir.empty()) {
    fs::create_directories(plots_dir);
    plot::scatter_with_band(pairs, "prediction vs blood test (" + mode_name + ")",
                            fs::path(plots_dir) / "scatter.svg");
    plot::bland_altman_plot(pairs, agreement,
                            fs::path(plots_dir) / "bland_altman.svg");
    plot::roc_plot(roc_report, fs::path(plots_dir) / "roc.svg");
  }
  return kExitOk;
}

int cmd_learning_curve(const std::string& dataset_path, double from, double to,
                       double step, std::size_t folds, std::uint64_t seed,
                       const std::string& out_path,
                       const std::string& plots_dir) {
  const SyntheticDataset ds = read_dataset_csv(dataset_path);
  if (!(from > 0.0 && to <= 1.0 && from <= to && step > 0.0))
    throw BadRange("fractions must satisfy 0 < from <= to <= 1, step > 0");
  LearningCurveOptions options;
  options.folds = folds;
  for (double f = from; f <= to + 1e-9; f += step) options.fractions.push_back(f);

  ModelSpec sal_spec = make_spec("hybrid", derive_seed(seed, "sal"));
  ModelSpec rgbl_spec = make_spec("hybrid", derive_seed(seed, "rgbl"));
  const LearningCurve curve =
      learning_curve(ds, sal_spec, rgbl_spec, options, seed);
  write_curve_csv(curve, out_path);

  if (curve.sal.size() >= 2) {
    const StabilitySummary summary = stability_summary(curve);
    const std::string json = stability_json(summary);
    std::ofstream out(out_path + ".stability.json");
    if (!out) throw IoError("cannot write " + out_path + ".stability.json");
    out << json << "\n";
    std::cout << json << "\n";
  }
  if (!plots_dir.empty()) {
    fs::create_directories(plots_dir);
    plot::curve_plot(curve, fs::path(plots_dir) / "learning_curve.svg");
  }
  std::cout << "curve with " << curve.sal.size() << " fractions written to "
            << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smartphone multispectral pipeline toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "root random seed")->capture_default_str();

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "compute a Wiener TM from a chart photo");
  std::string chart_path, image_path, layout = "6x4", device, out_path;
  double margin = 0.25;
  bool strict = false;
  calibrate->add_option("--chart", chart_path, "chart reference csv")->required();
  calibrate->add_option("--image", image_path, "chart photo (binary ppm)")->required();
  calibrate->add_option("--layout", layout, "box array, e.g. 6x4 or 12x8")->capture_default_str();
  calibrate->add_option("--device", device, "device model name")->required();
  calibrate->add_option("--out", out_path, "output profile path (default: profile store)");
  calibrate->add_option("--margin", margin, "sampling box margin fraction")->capture_default_str();
  calibrate->add_flag("--strict", strict, "fail on any exposure warning");

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "apply a profile to an image, write a cube");
  std::string rec_profile, rec_image, rec_out;
  reconstruct->add_option("--profile", rec_profile, "profile path or stored device name")->required();
  reconstruct->add_option("--image", rec_image, "input image (binary ppm)")->required();
  reconstruct->add_option("--out", rec_out, "output cube (.msc)")->required();

  // extract
  auto* extract = app.add_subcommand("extract", "average ROI spectra from a cube");
  std::string ext_cube, ext_rois, ext_out;
  extract->add_option("--cube", ext_cube, "input cube (.msc)")->required();
  extract->add_option("--rois", ext_rois, "roi csv (snapshot_id,x,y,side)")->required();
  extract->add_option("--out", ext_out, "output spectrum csv")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  std::size_t sim_n = 320;
  double sim_noise = 1.5;
  std::string sim_out;
  bool chart_test = false;
  simulate->add_option("--n", sim_n, "record count")->capture_default_str();
  simulate->add_option("--noise", sim_noise, "camera noise sigma (0-255 scale)")->capture_default_str();
  simulate->add_option("--out", sim_out, "output dataset csv")->required();
  simulate->add_flag("--chart-test", chart_test, "also run the cross-chart RMSE experiment");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "cross-validated prediction report");
  std::string eval_dataset, eval_mode = "sal", eval_model = "hybrid", eval_out, eval_plots;
  std::size_t eval_folds = 10;
  evaluate->add_option("--dataset", eval_dataset, "dataset csv")->required();
  evaluate->add_option("--mode", eval_mode, "sal|rgbl")->capture_default_str();
  evaluate->add_option("--model", eval_model, "hybrid|ann|svr|knn|rf")->capture_default_str();
  evaluate->add_option("--folds", eval_folds, "cross-validation folds")->capture_default_str();
  evaluate->add_option("--out", eval_out, "output report json")->required();
  evaluate->add_option("--plots", eval_plots, "directory for svg plots");

  // learning-curve
  auto* curve = app.add_subcommand("learning-curve", "SAL vs RGBL over resampling fractions");
  std::string lc_dataset, lc_out, lc_plots;
  double lc_from = 0.125, lc_to = 1.0, lc_step = 0.0625;
  std::size_t lc_folds = 10;
  curve->add_option("--dataset", lc_dataset, "dataset csv")->required();
  curve->add_option("--from", lc_from, "smallest fraction")->capture_default_str();
  curve->add_option("--to", lc_to, "largest fraction")->capture_default_str();
  curve->add_option("--step", lc_step, "fraction step")->capture_default_str();
  curve->add_option("--folds", lc_folds, "cross-validation folds")->capture_default_str();
  curve->add_option("--out", lc_out, "output curve csv")->required();
  curve->add_option("--plots", lc_plots, "directory for svg plots");

  CLI11_PARSE(app, argc, argv);

  try {
    if (calibrate->parsed())
      return cmd_calibrate(chart_path, image_path, layout, device, out_path,
                           margin, strict);
    if (reconstruct->parsed())
      return cmd_reconstruct(rec_profile, rec_image, rec_out);
    if (extract->parsed()) return cmd_extract(ext_cube, ext_rois, ext_out);
    if (simulate->parsed())
      return cmd_simulate(sim_n, seed, sim_noise, sim_out, chart_test);
    if (evaluate->parsed())
      return cmd_evaluate(eval_dataset, eval_mode, eval_model, eval_folds, seed,
                          eval_out, eval_plots);
    if (curve->parsed())
      return cmd_learning_curve(lc_dataset, lc_from, lc_to, lc_step, lc_folds,
                                seed, lc_out, lc_plots);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
