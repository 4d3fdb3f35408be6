#pragma once

#include <cstddef>
#include <vector>

namespace speccam {

// Ordered band centers in nm. The default profile is 420..680 nm in 10 nm
// steps (27 bands).
class WavelengthGrid {
 public:
  explicit WavelengthGrid(std::vector<double> bands);

  static const WavelengthGrid& default_grid();

  const std::vector<double>& bands() const { return bands_; }
  std::size_t size() const { return bands_.size(); }
  double min_nm() const { return bands_.front(); }
  double max_nm() const { return bands_.back(); }

  // Index of the nearest band. Ties at the half-step round toward the lower
  // wavelength. Throws BandNotFound when nm overshoots either end by more
  // than half the end step.
  std::size_t nearest_band(double nm) const;

  // Index of an exact grid band; throws BandNotFound otherwise.
  std::size_t exact_band(double nm) const;

  bool operator==(const WavelengthGrid& other) const {
    return bands_ == other.bands_;
  }

 private:
  std::vector<double> bands_;
};

struct RgbTriple {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  double max_channel() const { return r > g ? (r > b ? r : b) : (g > b ? g : b); }
  bool operator==(const RgbTriple&) const = default;
};

// Per-band reflectance on a grid. Dimensionless; values above 1 are allowed
// (hyper-reflection) and never clamped in analysis.
class Spectrum {
 public:
  Spectrum(WavelengthGrid grid, std::vector<double> values);

  static Spectrum constant(double value,
                           const WavelengthGrid& grid = WavelengthGrid::default_grid());

  const WavelengthGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t band) const { return values_[band]; }

  bool operator==(const Spectrum& other) const {
    return grid_ == other.grid_ && values_ == other.values_;
  }

 private:
  WavelengthGrid grid_;
  std::vector<double> values_;
};

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<RgbTriple> pixels;  // row-major

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h) {}

  RgbTriple& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  const RgbTriple& at(std::size_t x, std::size_t y) const {
    return pixels[y * width + x];
  }
};

// Square window, default 100 px per side.
struct Roi {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t side = 100;

  bool inside(std::size_t width, std::size_t height) const {
    return side >= 1 && x + side <= width && y + side <= height;
  }
};

// Band-sequential planes, row-major within each plane. 64-bit in memory;
// the cube file format quantizes to 32-bit floats.
class SpectralCube {
 public:
  SpectralCube(std::size_t width, std::size_t height, WavelengthGrid grid);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const WavelengthGrid& grid() const { return grid_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double at(std::size_t x, std::size_t y, std::size_t band) const {
    return data_[band * width_ * height_ + y * width_ + x];
  }
  void set(std::size_t x, std::size_t y, std::size_t band, double v) {
    data_[band * width_ * height_ + y * width_ + x] = v;
  }

  Spectrum pixel_spectrum(std::size_t x, std::size_t y) const;

 private:
  std::size_t width_;
  std::size_t height_;
  WavelengthGrid grid_;
  std::vector<double> data_;
};

// Per-band arithmetic mean. Throws EmptyInput / GridMismatch.
Spectrum mean_spectra(const std::vector<Spectrum>& spectra);

// Divide every band by the value at nm; result[nm] == 1 exactly.
// Throws DegenerateNormalizer when s[nm] <= 0, BandNotFound off-grid.
Spectrum normalize_at(const Spectrum& s, double nm);

// Value at the nearest band (ties round down). Throws BandNotFound outside
// the half-step tolerance.
double band_value(const Spectrum& s, double nm);

}  // namespace speccam
