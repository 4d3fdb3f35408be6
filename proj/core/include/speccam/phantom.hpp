#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speccam/calibration.hpp"
#include "speccam/rng.hpp"
#include "speccam/spectral.hpp"

namespace speccam {

// 1 mg/dL of bilirubin = 17.1 umol/L.
inline constexpr double kUmolPerMgDl = 17.1;

// Absorption scale constants: at 30 mg/dL the 460 nm reflectance drops to
// one tenth of the background.
inline constexpr double kBilirubinScale = 0.07675283643313485;  // ln(10)/30
inline constexpr double kHemoglobinScale = 0.12;

// Synthetic chromophore curves: bilirubin peaks at 460 nm (sigma 35 nm,
// unit height); hemoglobin has peaks at 540 and 576 nm (sigma 15 nm,
// heights 1.0 and 0.8). Valid on [400, 700] nm.
double bilirubin_extinction(double nm);
double hemoglobin_extinction(double nm);

struct PhantomSpec {
  double bilirubin_mg_dl = 0.0;
  double hemoglobin = 0.0;  // arbitrary units
  double pathlength = 1.0;
  Spectrum background = Spectrum::constant(0.9);
};

// Beer-Lambert composition over the background scattering base.
Spectrum phantom_reflectance(const PhantomSpec& spec);

// Stand-in phone camera: overlapping Gaussian channel sensitivities
// (R/G/B centered 600/540/465 nm, sigma 45/45/40 nm), flat illuminant,
// response scaled so a flat unit spectrum at gain 1 peaks at 200.
struct CameraModel {
  double red_center = 600.0, red_sigma = 45.0;
  double green_center = 540.0, green_sigma = 45.0;
  double blue_center = 465.0, blue_sigma = 40.0;
  double illuminant = 1.0;  // flat relative power
  double gain = 1.0;
  double noise_sigma = 0.0;  // additive Gaussian on the 0-255 scale
  std::uint64_t seed = 0;

  double sensitivity(int channel, double nm) const;
};

// channel = gain * scale * sum sensitivity*illuminant*s*dlambda, noise
// added then clamped to [0, 255]. The overload without an Rng draws noise
// from camera.seed, so the same (camera, spectrum) is reproducible.
RgbTriple render_rgb(const CameraModel& camera, const Spectrum& s, Rng& rng);
RgbTriple render_rgb(const CameraModel& camera, const Spectrum& s);

struct DatasetRecord {
  RgbTriple rgb;       // observed (rendered, noisy)
  Spectrum spectrum;   // true phantom reflectance
  double bbl_umol_l = 0.0;
};

struct SyntheticDataset {
  std::vector<DatasetRecord> records;
  std::uint64_t seed = 0;
  std::string provenance;
};

struct DatasetOptions {
  std::size_t n = 320;
  double bbl_min = 2.0;    // umol/L
  double bbl_max = 450.0;
  bool log_uniform = true;
  // Nuisance variation per record: hemoglobin, background level and a
  // spectral tilt of the background.
  double hemoglobin_min = 0.2, hemoglobin_max = 1.5;
  double background_min = 0.82, background_max = 0.92;
  double tilt_max = 0.06;
};

// Deterministic given seed; records use order-independent per-record
// sub-seeds. Throws BadRange on an invalid bbl interval.
SyntheticDataset generate_dataset(const DatasetOptions& options,
                                  const CameraModel& camera,
                                  std::uint64_t seed);

// A chart whose blocks live in a smooth three-parameter reflectance family
// (base level plus two broad Gaussian humps), values in [0, 1].
ColorChart make_synthetic_chart(const std::string& name, std::size_t n_blocks,
                                std::uint64_t seed);

// A chart of phantom-family spectra spanning the concentration range, used
// to calibrate a phantom-matched transformation matrix.
ColorChart make_phantom_chart(const std::string& name, std::uint64_t seed);

struct ChartScene {
  RgbImage image;
  ChartSamples truth;  // exact per-block RGB used for the flat cells
  ChartLayout layout;
};

// Renders each block to RGB and composes a flat-cell image (6x4 for 24
// blocks, 12x8 for 96, cell_px pixels per cell edge).
ChartScene generate_chart_scene(const ColorChart& chart,
                                const CameraModel& camera,
                                std::size_t cell_px = 24);

}  // namespace speccam
