#pragma once

#include <variant>
#include <vector>

#include "speccam/calibration.hpp"
#include "speccam/spectral.hpp"

namespace speccam {

// 10 snapshots x 10 ROIs in the clinical protocol; any counts >= 1 here.
struct Snapshot {
  std::variant<RgbImage, SpectralCube> source;
  std::vector<Roi> rois;
};

struct MeasurementSession {
  std::vector<Snapshot> snapshots;
};

struct RoiQualityPolicy {
  double max_mean_rgb = 240.0;  // hyper-reflection cutoff
  double min_mean_rgb = 30.0;
  double max_saturated_fraction = 0.01;
};

enum class RoiVerdict { Accept, Reject };

// s = W * [r,g,b]^t on tm.grid.
Spectrum reconstruct_pixel(const TransformationMatrix& tm, const RgbTriple& rgb);

// Per-pixel application; identical arithmetic order as the scalar path.
SpectralCube reconstruct_image(const TransformationMatrix& tm,
                               const RgbImage& image);

// Per-band mean over the ROI window. Throws RoiOutOfBounds.
Spectrum extract_roi_spectrum(const SpectralCube& cube, const Roi& roi);

// Three-stage averaging: per-ROI mean, mean over ROIs within a snapshot,
// mean over snapshots (mean-of-means, snapshots weighted equally).
// RgbImage snapshots are reconstructed lazily per ROI through tm.
Spectrum aggregate_session(const MeasurementSession& session,
                           const TransformationMatrix& tm);

// Reject hyper-reflective, under-illuminated or saturated ROIs.
RoiVerdict check_roi_quality(const RgbImage& image, const Roi& roi,
                             const RoiQualityPolicy& policy);

// Cube variant: reflectance read through the 0-255 policy scale (max band
// value times 255; saturated at reflectance >= 1).
RoiVerdict check_roi_quality(const SpectralCube& cube, const Roi& roi,
                             const RoiQualityPolicy& policy);

// (reference[nm] - s[nm]) / reference[nm]; both spectra 680 nm-normalized
// by the caller.
double reflectance_reduction(const Spectrum& s, const Spectrum& reference,
                             double nm);

// s[460] / s[500], the non-learning bilirubin index.
double two_band_index(const Spectrum& s);

}  // namespace speccam
