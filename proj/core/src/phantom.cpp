#include "speccam/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "speccam/error.hpp"

namespace speccam {

namespace {

double gaussian(double nm, double center, double sigma) {
  const double d = (nm - center) / sigma;
  return std::exp(-0.5 * d * d);
}

void require_chromophore_range(double nm) {
  if (!(nm >= 400.0 && nm <= 700.0)) {
    std::ostringstream msg;
    msg << nm << " nm outside chromophore range [400, 700]";
    throw BandNotFound(msg.str());
  }
}

}  // namespace

double bilirubin_extinction(double nm) {
  require_chromophore_range(nm);
  return gaussian(nm, 460.0, 35.0);
}

double hemoglobin_extinction(double nm) {
  require_chromophore_range(nm);
  return gaussian(nm, 540.0, 15.0) + 0.8 * gaussian(nm, 576.0, 15.0);
}

Spectrum phantom_reflectance(const PhantomSpec& spec) {
  const WavelengthGrid& grid = spec.background.grid();
  std::vector<double> v(grid.size());
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const double nm = grid.bands()[b];
    const double absorbance =
        (kBilirubinScale * bilirubin_extinction(nm) * spec.bilirubin_mg_dl +
         kHemoglobinScale * hemoglobin_extinction(nm) * spec.hemoglobin) *
        spec.pathlength;
    v[b] = spec.background[b] * std::exp(-absorbance);
  }
  return Spectrum(grid, std::move(v));
}

double CameraModel::sensitivity(int channel, double nm) const {
  switch (channel) {
    case 0: return gaussian(nm, red_center, red_sigma);
    case 1: return gaussian(nm, green_center, green_sigma);
    default: return gaussian(nm, blue_center, blue_sigma);
  }
}

RgbTriple render_rgb(const CameraModel& camera, const Spectrum& s, Rng& rng) {
  const WavelengthGrid& grid = s.grid();
  const double dl = grid.size() > 1
                        ? (grid.max_nm() - grid.min_nm()) / (grid.size() - 1)
                        : 1.0;
  double raw[3] = {0.0, 0.0, 0.0};
  double flat[3] = {0.0, 0.0, 0.0};
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const double nm = grid.bands()[b];
    for (int c = 0; c < 3; ++c) {
      const double w = camera.sensitivity(c, nm) * camera.illuminant * dl;
      raw[c] += w * s[b];
      flat[c] += w;
    }
  }
  // normalize so a flat unit spectrum at gain 1 peaks at 200
  const double scale = 200.0 / std::max({flat[0], flat[1], flat[2]});
  double out[3];
  for (int c = 0; c < 3; ++c) {
    double v = camera.gain * scale * raw[c];
    if (camera.noise_sigma > 0.0) v += rng.normal(0.0, camera.noise_sigma);
    out[c] = std::clamp(v, 0.0, 255.0);
  }
  return {out[0], out[1], out[2]};
}

RgbTriple render_rgb(const CameraModel& camera, const Spectrum& s) {
  Rng rng(derive_seed(camera.seed, "render"));
  return render_rgb(camera, s, rng);
}

SyntheticDataset generate_dataset(const DatasetOptions& options,
                                  const CameraModel& camera,
                                  std::uint64_t seed) {
  if (options.n < 1) throw BadRange("dataset size must be >= 1");
  if (!(options.bbl_min >= 0.0) || !(options.bbl_max >= options.bbl_min))
    throw BadRange("bbl range must satisfy 0 <= min <= max");

  const WavelengthGrid& grid = WavelengthGrid::default_grid();
  SyntheticDataset ds;
  ds.seed = seed;
  {
    std::ostringstream p;
    p << "n=" << options.n << " bbl=[" << options.bbl_min << ","
      << options.bbl_max << "]" << (options.log_uniform ? " log-uniform" : "")
      << " hemoglobin=[" << options.hemoglobin_min << ","
      << options.hemoglobin_max << "]"
      << " background=[" << options.background_min << ","
      << options.background_max << "]"
      << " tilt=" << options.tilt_max
      << " noise_sigma=" << camera.noise_sigma << " seed=" << seed;
    ds.provenance = p.str();
  }
  ds.records.reserve(options.n);
  for (std::size_t i = 0; i < options.n; ++i) {
    Rng rng(derive_seed(seed, "record", i));
    double bbl;
    if (options.bbl_max == options.bbl_min) {
      bbl = options.bbl_min;
    } else if (options.log_uniform && options.bbl_min > 0.0) {
      bbl = std::exp(
          rng.uniform(std::log(options.bbl_min), std::log(options.bbl_max)));
    } else {
      bbl = rng.uniform(options.bbl_min, options.bbl_max);
    }
    PhantomSpec spec;
    spec.bilirubin_mg_dl = bbl / kUmolPerMgDl;
    spec.hemoglobin = rng.uniform(options.hemoglobin_min, options.hemoglobin_max);
    const double bg0 = rng.uniform(options.background_min, options.background_max);
    const double tilt = rng.uniform(-options.tilt_max, options.tilt_max);
    std::vector<double> bg(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
      bg[b] = bg0 * (1.0 + tilt * (grid.bands()[b] - 550.0) / 130.0);
    spec.background = Spectrum(grid, std::move(bg));

    DatasetRecord rec{{0, 0, 0}, phantom_reflectance(spec), bbl};
    rec.rgb = render_rgb(camera, rec.spectrum, rng);
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

ColorChart make_synthetic_chart(const std::string& name, std::size_t n_blocks,
                                std::uint64_t seed) {
  const WavelengthGrid& grid = WavelengthGrid::default_grid();
  ColorChart chart;
  chart.name = name;
  chart.blocks.reserve(n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    Rng rng(derive_seed(seed, "chart-block", i));
    const double base = rng.uniform(0.15, 0.55);
    const double hump_blue = rng.uniform(0.0, 0.35);
    const double hump_red = rng.uniform(0.0, 0.35);
    std::vector<double> v(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b) {
      const double nm = grid.bands()[b];
      v[b] = base + hump_blue * gaussian(nm, 470.0, 60.0) +
             hump_red * gaussian(nm, 590.0, 60.0);
    }
    std::ostringstream id;
    id << "b" << (i < 9 ? "0" : "") << (i + 1);
    chart.blocks.push_back({id.str(), Spectrum(grid, std::move(v))});
  }
  return chart;
}

ColorChart make_phantom_chart(const std::string& name, std::uint64_t seed) {
  static const double concentrations[] = {0.0,  0.23, 0.47, 0.94, 1.88,
                                          3.75, 7.50, 15.0, 30.0};
  static const double hemoglobins[] = {0.2, 0.85, 1.5};
  static const double tilts[] = {-0.05, 0.0, 0.05};
  const WavelengthGrid& grid = WavelengthGrid::default_grid();
  ColorChart chart;
  chart.name = name;
  std::size_t idx = 0;
  for (double c : concentrations) {
    for (std::size_t h = 0; h < 3; ++h, ++idx) {
      Rng rng(derive_seed(seed, "phantom-chart", idx));
      const double bg0 = rng.uniform(0.82, 0.92);
      const double tilt = tilts[idx % 3];
      PhantomSpec spec;
      spec.bilirubin_mg_dl = c;
      spec.hemoglobin = hemoglobins[h];
      std::vector<double> bg(grid.size());
      for (std::size_t b = 0; b < grid.size(); ++b)
        bg[b] = bg0 * (1.0 + tilt * (grid.bands()[b] - 550.0) / 130.0);
      spec.background = Spectrum(grid, std::move(bg));
      std::ostringstream id;
      id << "p" << (idx < 9 ? "0" : "") << (idx + 1);
      chart.blocks.push_back({id.str(), phantom_reflectance(spec)});
    }
  }
  return chart;
}

ChartScene generate_chart_scene(const ColorChart& chart,
                                const CameraModel& camera,
                                std::size_t cell_px) {
  ChartLayout layout;
  if (chart.blocks.size() == 24) {
    layout = {6, 4};
  } else if (chart.blocks.size() == 96) {
    layout = {12, 8};
  } else if (chart.blocks.size() == 27) {
    layout = {9, 3};
  } else {
    throw ChartMismatch("no layout for this block count");
  }

  CameraModel noiseless = camera;
  noiseless.noise_sigma = 0.0;

  ChartScene scene;
  scene.layout = layout;
  scene.truth.chart_name = chart.name;
  scene.image = RgbImage(layout.cols * cell_px, layout.rows * cell_px);

  Rng rng(derive_seed(camera.seed, "chart-scene"));
  std::size_t idx = 0;
  for (std::size_t row = 0; row < layout.rows; ++row) {
    for (std::size_t col = 0; col < layout.cols; ++col, ++idx) {
      const RgbTriple flat = render_rgb(noiseless, chart.blocks[idx].reflectance);
      scene.truth.samples.push_back({chart.blocks[idx].id, flat});
      for (std::size_t y = row * cell_px; y < (row + 1) * cell_px; ++y) {
        for (std::size_t x = col * cell_px; x < (col + 1) * cell_px; ++x) {
          RgbTriple p = flat;
          if (camera.noise_sigma > 0.0) {
            p.r = std::clamp(p.r + rng.normal(0.0, camera.noise_sigma), 0.0, 255.0);
            p.g = std::clamp(p.g + rng.normal(0.0, camera.noise_sigma), 0.0, 255.0);
            p.b = std::clamp(p.b + rng.normal(0.0, camera.noise_sigma), 0.0, 255.0);
          }
          scene.image.at(x, y) = p;
        }
      }
    }
  }
  return scene;
}

}  // namespace speccam
