#include "speccam/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "speccam/error.hpp"

namespace speccam {

WavelengthGrid::WavelengthGrid(std::vector<double> bands)
    : bands_(std::move(bands)) {
  if (bands_.empty()) throw EmptyInput("wavelength grid needs at least one band");
  for (std::size_t i = 1; i < bands_.size(); ++i) {
    if (!(bands_[i] > bands_[i - 1]))
      throw BandNotFound("grid bands must be strictly increasing");
  }
  for (double b : bands_) {
    if (!std::isfinite(b)) throw BandNotFound("grid band not finite");
  }
}

const WavelengthGrid& WavelengthGrid::default_grid() {
  static const WavelengthGrid grid = [] {
    std::vector<double> bands;
    for (int nm = 420; nm <= 680; nm += 10) bands.push_back(nm);
    return WavelengthGrid(bands);
  }();
  return grid;
}

std::size_t WavelengthGrid::nearest_band(double nm) const {
  const double lo_tol = bands_.size() > 1 ? (bands_[1] - bands_[0]) / 2.0 : 0.0;
  const double hi_tol = bands_.size() > 1
                            ? (bands_.back() - bands_[bands_.size() - 2]) / 2.0
                            : 0.0;
  if (nm < bands_.front() - lo_tol || nm > bands_.back() + hi_tol) {
    std::ostringstream msg;
    msg << nm << " nm outside grid [" << bands_.front() << ", " << bands_.back()
        << "] tolerance";
    throw BandNotFound(msg.str());
  }
  auto it = std::lower_bound(bands_.begin(), bands_.end(), nm);
  if (it == bands_.end()) return bands_.size() - 1;
  if (it == bands_.begin()) return 0;
  std::size_t hi = static_cast<std::size_t>(it - bands_.begin());
  std::size_t lo = hi - 1;
  // ties round toward the lower wavelength
  return (nm - bands_[lo] <= bands_[hi] - nm) ? lo : hi;
}

std::size_t WavelengthGrid::exact_band(double nm) const {
  auto it = std::lower_bound(bands_.begin(), bands_.end(), nm);
  if (it == bands_.end() || *it != nm) {
    std::ostringstream msg;
    msg << nm << " nm is not a grid band";
    throw BandNotFound(msg.str());
  }
  return static_cast<std::size_t>(it - bands_.begin());
}

Spectrum::Spectrum(WavelengthGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw GridMismatch("spectrum length differs from grid band count");
  for (double v : values_) {
    if (!std::isfinite(v)) throw GridMismatch("spectrum value not finite");
  }
}

Spectrum Spectrum::constant(double value, const WavelengthGrid& grid) {
  return Spectrum(grid, std::vector<double>(grid.size(), value));
}

SpectralCube::SpectralCube(std::size_t width, std::size_t height,
                           WavelengthGrid grid)
    : width_(width), height_(height), grid_(std::move(grid)),
      data_(width * height * grid_.size(), 0.0) {
  if (width_ == 0 || height_ == 0)
    throw EmptyInput("cube dimensions must be >= 1");
}

Spectrum SpectralCube::pixel_spectrum(std::size_t x, std::size_t y) const {
  std::vector<double> v(grid_.size());
  for (std::size_t b = 0; b < grid_.size(); ++b) v[b] = at(x, y, b);
  return Spectrum(grid_, std::move(v));
}

Spectrum mean_spectra(const std::vector<Spectrum>& spectra) {
  if (spectra.empty()) throw EmptyInput("mean of zero spectra");
  const WavelengthGrid& grid = spectra.front().grid();
  std::vector<double> acc(grid.size(), 0.0);
  for (const Spectrum& s : spectra) {
    if (!(s.grid() == grid)) throw GridMismatch("mean_spectra grids differ");
    for (std::size_t b = 0; b < acc.size(); ++b) acc[b] += s[b];
  }
  const double n = static_cast<double>(spectra.size());
  for (double& v : acc) v /= n;
  return Spectrum(grid, std::move(acc));
}

Spectrum normalize_at(const Spectrum& s, double nm) {
  std::size_t band = s.grid().exact_band(nm);
  double denom = s[band];
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "reflectance at " << nm << " nm is " << denom;
    throw DegenerateNormalizer(msg.str());
  }
  std::vector<double> v(s.values());
  for (double& x : v) x /= denom;
  v[band] = 1.0;  // exact by contract
  return Spectrum(s.grid(), std::move(v));
}

double band_value(const Spectrum& s, double nm) {
  return s[s.grid().nearest_band(nm)];
}

}  // namespace speccam
