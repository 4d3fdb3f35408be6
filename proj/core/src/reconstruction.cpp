#include "speccam/reconstruction.hpp"

#include <cmath>
#include <sstream>

#include "speccam/error.hpp"

namespace speccam {

namespace {

void require_inside(const Roi& roi, std::size_t width, std::size_t height) {
  if (!roi.inside(width, height)) {
    std::ostringstream msg;
    msg << "roi (" << roi.x << "," << roi.y << ") side " << roi.side
        << " outside " << width << "x" << height;
    throw RoiOutOfBounds(msg.str());
  }
}

// Per-band mean of an image ROI through the matrix, arithmetic order
// matching reconstruct_image + extract_roi_spectrum exactly.
Spectrum roi_spectrum_lazy(const TransformationMatrix& tm,
                           const RgbImage& image, const Roi& roi) {
  require_inside(roi, image.width, image.height);
  const std::size_t bands = tm.grid.size();
  std::vector<double> acc(bands, 0.0);
  for (std::size_t b = 0; b < bands; ++b) {
    double sum = 0.0;
    for (std::size_t y = roi.y; y < roi.y + roi.side; ++y) {
      for (std::size_t x = roi.x; x < roi.x + roi.side; ++x) {
        const RgbTriple& p = image.at(x, y);
        sum += tm.rows[b][0] * p.r + tm.rows[b][1] * p.g + tm.rows[b][2] * p.b;
      }
    }
    acc[b] = sum / (static_cast<double>(roi.side) * roi.side);
  }
  return Spectrum(tm.grid, std::move(acc));
}

}  // namespace

Spectrum reconstruct_pixel(const TransformationMatrix& tm,
                           const RgbTriple& rgb) {
  std::vector<double> v(tm.grid.size());
  for (std::size_t b = 0; b < v.size(); ++b)
    v[b] = tm.rows[b][0] * rgb.r + tm.rows[b][1] * rgb.g + tm.rows[b][2] * rgb.b;
  return Spectrum(tm.grid, std::move(v));
}

SpectralCube reconstruct_image(const TransformationMatrix& tm,
                               const RgbImage& image) {
  SpectralCube cube(image.width, image.height, tm.grid);
  const std::size_t plane = image.width * image.height;
  double* data = cube.data().data();
  for (std::size_t b = 0; b < tm.grid.size(); ++b) {
    const double wr = tm.rows[b][0], wg = tm.rows[b][1], wb = tm.rows[b][2];
    double* out = data + b * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      const RgbTriple& p = image.pixels[i];
      out[i] = wr * p.r + wg * p.g + wb * p.b;
    }
  }
  return cube;
}

Spectrum extract_roi_spectrum(const SpectralCube& cube, const Roi& roi) {
  require_inside(roi, cube.width(), cube.height());
  const std::size_t bands = cube.grid().size();
  std::vector<double> acc(bands, 0.0);
  for (std::size_t b = 0; b < bands; ++b) {
    double sum = 0.0;
    for (std::size_t y = roi.y; y < roi.y + roi.side; ++y)
      for (std::size_t x = roi.x; x < roi.x + roi.side; ++x)
        sum += cube.at(x, y, b);
    acc[b] = sum / (static_cast<double>(roi.side) * roi.side);
  }
  return Spectrum(cube.grid(), std::move(acc));
}

Spectrum aggregate_session(const MeasurementSession& session,
                           const TransformationMatrix& tm) {
  if (session.snapshots.empty()) throw EmptyInput("session has no snapshots");
  std::vector<Spectrum> per_snapshot;
  per_snapshot.reserve(session.snapshots.size());
  for (const Snapshot& snap : session.snapshots) {
    if (snap.rois.empty()) throw EmptyInput("snapshot has no ROIs");
    std::vector<Spectrum> per_roi;
    per_roi.reserve(snap.rois.size());
    for (const Roi& roi : snap.rois) {
      if (std::holds_alternative<RgbImage>(snap.source)) {
        per_roi.push_back(
            roi_spectrum_lazy(tm, std::get<RgbImage>(snap.source), roi));
      } else {
        per_roi.push_back(
            extract_roi_spectrum(std::get<SpectralCube>(snap.source), roi));
      }
    }
    per_snapshot.push_back(mean_spectra(per_roi));
  }
  return mean_spectra(per_snapshot);
}

RoiVerdict check_roi_quality(const RgbImage& image, const Roi& roi,
                             const RoiQualityPolicy& policy) {
  require_inside(roi, image.width, image.height);
  double sum_max = 0.0;
  std::size_t saturated = 0;
  const std::size_t count = roi.side * roi.side;
  for (std::size_t y = roi.y; y < roi.y + roi.side; ++y) {
    for (std::size_t x = roi.x; x < roi.x + roi.side; ++x) {
      const RgbTriple& p = image.at(x, y);
      sum_max += p.max_channel();
      if (p.r >= 255.0 || p.g >= 255.0 || p.b >= 255.0) ++saturated;
    }
  }
  const double mean_max = sum_max / count;
  const double sat_frac = static_cast<double>(saturated) / count;
  if (mean_max > policy.max_mean_rgb || mean_max < policy.min_mean_rgb ||
      sat_frac > policy.max_saturated_fraction)
    return RoiVerdict::Reject;
  return RoiVerdict::Accept;
}

RoiVerdict check_roi_quality(const SpectralCube& cube, const Roi& roi,
                             const RoiQualityPolicy& policy) {
  require_inside(roi, cube.width(), cube.height());
  const std::size_t bands = cube.grid().size();
  double sum_max = 0.0;
  std::size_t saturated = 0;
  const std::size_t count = roi.side * roi.side;
  for (std::size_t y = roi.y; y < roi.y + roi.side; ++y) {
    for (std::size_t x = roi.x; x < roi.x + roi.side; ++x) {
      double mx = 0.0;
      for (std::size_t b = 0; b < bands; ++b)
        mx = std::max(mx, cube.at(x, y, b));
      sum_max += mx * 255.0;
      if (mx >= 1.0) ++saturated;
    }
  }
  const double mean_max = sum_max / count;
  const double sat_frac = static_cast<double>(saturated) / count;
  if (mean_max > policy.max_mean_rgb || mean_max < policy.min_mean_rgb ||
      sat_frac > policy.max_saturated_fraction)
    return RoiVerdict::Reject;
  return RoiVerdict::Accept;
}

double reflectance_reduction(const Spectrum& s, const Spectrum& reference,
                             double nm) {
  const double ref = band_value(reference, nm);
  if (!(ref > 0.0)) {
    std::ostringstream msg;
    msg << "reference at " << nm << " nm is " << ref;
    throw DegenerateNormalizer(msg.str());
  }
  return (ref - band_value(s, nm)) / ref;
}

double two_band_index(const Spectrum& s) {
  const double denom = band_value(s, 500.0);
  if (!(denom > 0.0))
    throw DegenerateNormalizer("reflectance at 500 nm is not positive");
  return band_value(s, 460.0) / denom;
}

}  // namespace speccam
