#include <cmath>

#include <doctest.h>

#include "speccam/error.hpp"
#include "speccam/rng.hpp"
#include "speccam/spectral.hpp"

using namespace speccam;

namespace {

Spectrum random_spectrum(Rng& rng) {
  std::vector<double> v(WavelengthGrid::default_grid().size());
  for (double& x : v) x = rng.uniform(0.0, 1.5);
  return Spectrum(WavelengthGrid::default_grid(), std::move(v));
}

}  // namespace

TEST_CASE("default grid is 420..680 nm in 10 nm steps") {
  const WavelengthGrid& g = WavelengthGrid::default_grid();
  CHECK(g.size() == 27);
  CHECK(g.bands()[0] == 420.0);
  CHECK(g.bands()[26] == 680.0);
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(g.bands()[i] - g.bands()[i - 1] == 10.0);
  CHECK(WavelengthGrid::default_grid() == g);
}

TEST_CASE("grid rejects non-increasing bands") {
  CHECK_THROWS_AS(WavelengthGrid({420.0, 420.0}), BandNotFound);
  CHECK_THROWS_AS(WavelengthGrid({430.0, 420.0}), BandNotFound);
  CHECK_THROWS_AS(WavelengthGrid({}), EmptyInput);
}

TEST_CASE("mean_spectra of identical inputs is the input") {
  Rng rng(11);
  const Spectrum s = random_spectrum(rng);
  const Spectrum m = mean_spectra({s, s});
  for (std::size_t b = 0; b < s.size(); ++b) CHECK(m[b] == doctest::Approx(s[b]));
}

TEST_CASE("mean_spectra of constants") {
  const Spectrum m =
      mean_spectra({Spectrum::constant(0.2), Spectrum::constant(0.4)});
  for (double v : m.values()) CHECK(v == doctest::Approx(0.3));
}

TEST_CASE("mean_spectra matches a direct summation oracle") {
  Rng rng(12);
  std::vector<Spectrum> spectra;
  for (int i = 0; i < 10; ++i) spectra.push_back(random_spectrum(rng));
  const Spectrum m = mean_spectra(spectra);
  for (std::size_t b = 0; b < m.size(); ++b) {
    double sum = 0.0;
    for (const Spectrum& s : spectra) sum += s[b];
    CHECK(std::abs(m[b] - sum / 10.0) < 1e-12);
  }
}

TEST_CASE("mean_spectra error cases") {
  CHECK_THROWS_AS(mean_spectra({}), EmptyInput);
  const Spectrum a = Spectrum::constant(0.5);
  const Spectrum b = Spectrum::constant(0.5, WavelengthGrid({420.0, 430.0}));
  CHECK_THROWS_AS(mean_spectra({a, b}), GridMismatch);
}

TEST_CASE("mean_spectra is linear in a scalar factor") {
  Rng rng(13);
  std::vector<Spectrum> spectra, scaled;
  const double a = 2.75;
  for (int i = 0; i < 6; ++i) {
    Spectrum s = random_spectrum(rng);
    std::vector<double> v = s.values();
    for (double& x : v) x *= a;
    scaled.emplace_back(s.grid(), std::move(v));
    spectra.push_back(std::move(s));
  }
  const Spectrum m = mean_spectra(spectra);
  const Spectrum ms = mean_spectra(scaled);
  for (std::size_t b = 0; b < m.size(); ++b)
    CHECK(std::abs(ms[b] - a * m[b]) < 1e-12);
}

TEST_CASE("normalize_at basics") {
  const Spectrum c = normalize_at(Spectrum::constant(0.5), 680.0);
  for (double v : c.values()) CHECK(v == 1.0);

  std::vector<double> v(27, 0.6);
  const WavelengthGrid& g = WavelengthGrid::default_grid();
  v[g.exact_band(680.0)] = 0.8;
  v[g.exact_band(460.0)] = 0.4;
  const Spectrum n = normalize_at(Spectrum(g, v), 680.0);
  CHECK(n[g.exact_band(460.0)] == doctest::Approx(0.5));
  CHECK(n[g.exact_band(680.0)] == 1.0);

  // idempotent after the first application
  const Spectrum n2 = normalize_at(n, 680.0);
  for (std::size_t b = 0; b < n.size(); ++b) CHECK(n2[b] == n[b]);
}

TEST_CASE("normalize_at pins the anchor band to exactly 1") {
  Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    Spectrum s = random_spectrum(rng);
    if (!(s[26] > 0.0)) continue;
    CHECK(normalize_at(s, 680.0)[26] == 1.0);
  }
}

TEST_CASE("normalize_at error cases") {
  std::vector<double> v(27, 0.5);
  v[26] = 0.0;
  CHECK_THROWS_AS(normalize_at(Spectrum(WavelengthGrid::default_grid(), v), 680.0),
                  DegenerateNormalizer);
  CHECK_THROWS_AS(normalize_at(Spectrum::constant(0.5), 675.0), BandNotFound);
}

TEST_CASE("band_value nearest lookup with ties rounding down") {
  const WavelengthGrid& g = WavelengthGrid::default_grid();
  std::vector<double> v(27);
  for (std::size_t b = 0; b < 27; ++b) v[b] = 0.01 * static_cast<double>(b);
  const Spectrum s(g, v);
  const double at460 = v[g.exact_band(460.0)];
  CHECK(band_value(s, 460.0) == at460);
  CHECK(band_value(s, 464.0) == at460);
  CHECK(band_value(s, 465.0) == at460);  // tie rounds down
  CHECK(band_value(s, 466.0) == v[g.exact_band(470.0)]);
  CHECK(band_value(s, 416.0) == v[0]);   // within the half-step end tolerance
  CHECK(band_value(s, 684.0) == v[26]);
  CHECK_THROWS_AS(band_value(s, 414.0), BandNotFound);
  CHECK_THROWS_AS(band_value(s, 686.0), BandNotFound);
}

TEST_CASE("spectrum rejects non-finite values and length mismatch") {
  CHECK_THROWS_AS(Spectrum(WavelengthGrid::default_grid(), {1.0, 2.0}),
                  GridMismatch);
  std::vector<double> v(27, 0.5);
  v[3] = std::nan("");
  CHECK_THROWS_AS(Spectrum(WavelengthGrid::default_grid(), v), GridMismatch);
}

TEST_CASE("roi bounds check") {
  Roi roi{10, 20, 100};
  CHECK(roi.inside(110, 120));
  CHECK_FALSE(roi.inside(109, 120));
  CHECK_FALSE(roi.inside(110, 119));
  CHECK_FALSE(Roi{0, 0, 0}.inside(10, 10));
}

TEST_CASE("cube pixel accessors are band sequential") {
  SpectralCube cube(3, 2, WavelengthGrid::default_grid());
  cube.set(2, 1, 5, 0.75);
  CHECK(cube.at(2, 1, 5) == 0.75);
  CHECK(cube.data()[5 * 6 + 1 * 3 + 2] == 0.75);
  const Spectrum px = cube.pixel_spectrum(2, 1);
  CHECK(px[5] == 0.75);
  CHECK(px[0] == 0.0);
}
