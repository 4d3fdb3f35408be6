#include <cmath>

#include <doctest.h>

#include "speccam/error.hpp"
#include "speccam/evaluation.hpp"
#include "speccam/phantom.hpp"
#include "speccam/reconstruction.hpp"
#include "speccam/rng.hpp"

using namespace speccam;

namespace {

TransformationMatrix random_tm(std::uint64_t seed) {
  TransformationMatrix tm;
  Rng rng(seed);
  for (auto& row : tm.rows)
    for (double& w : row) w = rng.uniform(-0.005, 0.005);
  return tm;
}

RgbImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  RgbImage image(w, h);
  Rng rng(seed);
  for (auto& p : image.pixels)
    p = {rng.uniform(0.0, 255.0), rng.uniform(0.0, 255.0),
         rng.uniform(0.0, 255.0)};
  return image;
}

SpectralCube random_cube(std::size_t w, std::size_t h, std::uint64_t seed) {
  SpectralCube cube(w, h, WavelengthGrid::default_grid());
  Rng rng(seed);
  for (double& v : cube.data()) v = rng.uniform(0.0, 1.2);
  return cube;
}

}  // namespace

TEST_CASE("reconstruct_pixel basics") {
  TransformationMatrix zero;
  const Spectrum s0 = reconstruct_pixel(zero, {12.0, 200.0, 77.0});
  for (double v : s0.values()) CHECK(v == 0.0);

  TransformationMatrix single;
  single.rows[13][0] = 1.0;
  const Spectrum s1 = reconstruct_pixel(single, {2.0, 0.0, 0.0});
  for (std::size_t b = 0; b < s1.size(); ++b)
    CHECK(s1[b] == (b == 13 ? 2.0 : 0.0));
}

TEST_CASE("reconstruct_pixel is linear") {
  const TransformationMatrix tm = random_tm(21);
  const RgbTriple u{30.0, 90.0, 150.0}, v{200.0, 10.0, 60.0};
  const double a = 0.6, b = 1.7;
  const RgbTriple mix{a * u.r + b * v.r, a * u.g + b * v.g, a * u.b + b * v.b};
  const Spectrum su = reconstruct_pixel(tm, u);
  const Spectrum sv = reconstruct_pixel(tm, v);
  const Spectrum sm = reconstruct_pixel(tm, mix);
  for (std::size_t i = 0; i < sm.size(); ++i)
    CHECK(std::abs(sm[i] - (a * su[i] + b * sv[i])) < 1e-12);
}

TEST_CASE("phantom-calibrated tm reconstructs phantom spectra under 0.04 rmse") {
  const ColorChart chart = make_phantom_chart("phantom", 22);
  CameraModel camera;  // noiseless
  ChartSamples samples;
  samples.chart_name = chart.name;
  for (const auto& block : chart.blocks)
    samples.samples.push_back({block.id, render_rgb(camera, block.reflectance)});
  const TransformationMatrix tm = wiener_tm(samples, chart);

  double total = 0.0;
  for (const auto& block : chart.blocks) {
    const Spectrum rec =
        reconstruct_pixel(tm, render_rgb(camera, block.reflectance));
    total += spectral_rmse(rec, block.reflectance);
  }
  CHECK(total / chart.blocks.size() < 0.04);
}

TEST_CASE("reconstruct_image matches the scalar path exactly") {
  const TransformationMatrix tm = random_tm(23);

  const RgbImage one = random_image(1, 1, 24);
  const SpectralCube c1 = reconstruct_image(tm, one);
  const Spectrum p1 = reconstruct_pixel(tm, one.at(0, 0));
  for (std::size_t b = 0; b < 27; ++b) CHECK(c1.at(0, 0, b) == p1[b]);

  RgbImage flat(64, 64);
  for (auto& p : flat.pixels) p = {80.0, 140.0, 60.0};
  const SpectralCube cf = reconstruct_image(tm, flat);
  for (std::size_t b = 0; b < 27; ++b)
    for (std::size_t i = 0; i < 64 * 64; ++i)
      CHECK(cf.data()[b * 64 * 64 + i] == cf.data()[b * 64 * 64]);

  const RgbImage image = random_image(32, 32, 25);
  const SpectralCube cube = reconstruct_image(tm, image);
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 32; ++x) {
      const Spectrum s = reconstruct_pixel(tm, image.at(x, y));
      for (std::size_t b = 0; b < 27; ++b)
        CHECK(cube.at(x, y, b) == s[b]);  // 0 ulp: same arithmetic order
    }
}

TEST_CASE("extract_roi_spectrum") {
  SpectralCube constant(8, 8, WavelengthGrid::default_grid());
  for (double& v : constant.data()) v = 0.42;
  const Spectrum c = extract_roi_spectrum(constant, {1, 1, 4});
  for (double v : c.values()) CHECK(v == doctest::Approx(0.42));

  SpectralCube quad(2, 2, WavelengthGrid::default_grid());
  quad.set(0, 0, 7, 1.0);
  quad.set(1, 0, 7, 2.0);
  quad.set(0, 1, 7, 3.0);
  quad.set(1, 1, 7, 4.0);
  CHECK(extract_roi_spectrum(quad, {0, 0, 2})[7] == doctest::Approx(2.5));

  const SpectralCube cube = random_cube(16, 12, 26);
  const Roi roi{3, 2, 7};
  const Spectrum s = extract_roi_spectrum(cube, roi);
  for (std::size_t b = 0; b < 27; ++b) {
    double sum = 0.0;
    for (std::size_t y = roi.y; y < roi.y + roi.side; ++y)
      for (std::size_t x = roi.x; x < roi.x + roi.side; ++x)
        sum += cube.at(x, y, b);
    CHECK(std::abs(s[b] - sum / 49.0) < 1e-12);
  }

  CHECK_THROWS_AS(extract_roi_spectrum(cube, Roi{10, 2, 7}), RoiOutOfBounds);
}

TEST_CASE("aggregate_session equals extract for one snapshot and roi") {
  const SpectralCube cube = random_cube(16, 16, 27);
  MeasurementSession session;
  session.snapshots.push_back({cube, {Roi{2, 3, 5}}});
  const Spectrum agg = aggregate_session(session, TransformationMatrix{});
  const Spectrum direct = extract_roi_spectrum(cube, {2, 3, 5});
  for (std::size_t b = 0; b < 27; ++b) CHECK(agg[b] == direct[b]);
}

TEST_CASE("aggregate_session weights snapshots equally") {
  // snapshot 1 has one ROI, snapshot 2 has three; result is (m1+m2)/2
  const SpectralCube c1 = random_cube(16, 16, 28);
  const SpectralCube c2 = random_cube(16, 16, 29);
  MeasurementSession session;
  session.snapshots.push_back({c1, {Roi{0, 0, 4}}});
  session.snapshots.push_back(
      {c2, {Roi{1, 1, 4}, Roi{5, 5, 4}, Roi{9, 2, 4}}});
  const Spectrum agg = aggregate_session(session, TransformationMatrix{});

  const Spectrum m1 = extract_roi_spectrum(c1, {0, 0, 4});
  const Spectrum m2 = mean_spectra({extract_roi_spectrum(c2, {1, 1, 4}),
                                    extract_roi_spectrum(c2, {5, 5, 4}),
                                    extract_roi_spectrum(c2, {9, 2, 4})});
  for (std::size_t b = 0; b < 27; ++b)
    CHECK(std::abs(agg[b] - (m1[b] + m2[b]) / 2.0) < 1e-15);
}

TEST_CASE("aggregate_session matches a three-nested-loop oracle") {
  Rng rng(30);
  MeasurementSession session;
  std::vector<SpectralCube> cubes;
  for (int s = 0; s < 10; ++s)
    cubes.push_back(random_cube(20, 20, 31 + static_cast<std::uint64_t>(s)));
  for (int s = 0; s < 10; ++s) {
    Snapshot snap;
    snap.source = cubes[s];
    for (int r = 0; r < 10; ++r)
      snap.rois.push_back({rng.index(15), rng.index(15), 5});
    session.snapshots.push_back(std::move(snap));
  }
  const Spectrum agg = aggregate_session(session, TransformationMatrix{});

  for (std::size_t b = 0; b < 27; ++b) {
    double snap_sum = 0.0;
    for (int s = 0; s < 10; ++s) {
      double roi_sum = 0.0;
      for (const Roi& roi : session.snapshots[s].rois) {
        double px_sum = 0.0;
        for (std::size_t y = roi.y; y < roi.y + roi.side; ++y)
          for (std::size_t x = roi.x; x < roi.x + roi.side; ++x)
            px_sum += cubes[s].at(x, y, b);
        roi_sum += px_sum / 25.0;
      }
      snap_sum += roi_sum / 10.0;
    }
    CHECK(std::abs(agg[b] - snap_sum / 10.0) < 1e-12);
  }
}

TEST_CASE("aggregate_session is order invariant") {
  MeasurementSession session;
  for (int s = 0; s < 3; ++s) {
    Snapshot snap;
    snap.source = random_cube(12, 12, 50 + static_cast<std::uint64_t>(s));
    snap.rois = {Roi{0, 0, 4}, Roi{4, 4, 4}, Roi{7, 7, 4}};
    session.snapshots.push_back(std::move(snap));
  }
  const Spectrum a = aggregate_session(session, TransformationMatrix{});
  std::reverse(session.snapshots.begin(), session.snapshots.end());
  for (auto& snap : session.snapshots)
    std::reverse(snap.rois.begin(), snap.rois.end());
  const Spectrum b = aggregate_session(session, TransformationMatrix{});
  for (std::size_t i = 0; i < 27; ++i)
    CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("lazy roi reconstruction is bit-identical to the full cube path") {
  const TransformationMatrix tm = random_tm(33);
  const RgbImage image = random_image(40, 30, 34);
  const std::vector<Roi> rois = {Roi{0, 0, 8}, Roi{13, 7, 10}, Roi{30, 20, 9}};

  MeasurementSession lazy;
  lazy.snapshots.push_back({image, rois});
  MeasurementSession full;
  full.snapshots.push_back({reconstruct_image(tm, image), rois});

  const Spectrum a = aggregate_session(lazy, tm);
  const Spectrum b = aggregate_session(full, tm);
  for (std::size_t i = 0; i < 27; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("aggregate_session rejects empty stages") {
  CHECK_THROWS_AS(aggregate_session({}, TransformationMatrix{}), EmptyInput);
  MeasurementSession session;
  session.snapshots.push_back({random_cube(8, 8, 35), {}});
  CHECK_THROWS_AS(aggregate_session(session, TransformationMatrix{}),
                  EmptyInput);
}

TEST_CASE("end-to-end recalibration gain invariance") {
  const ColorChart chart = make_synthetic_chart("c24", 24, 36);
  CameraModel camera;  // noiseless
  ChartSamples samples;
  samples.chart_name = chart.name;
  for (const auto& block : chart.blocks)
    samples.samples.push_back({block.id, render_rgb(camera, block.reflectance)});

  RgbImage subject(16, 16);
  Rng rng(37);
  for (auto& p : subject.pixels)
    p = {rng.uniform(40.0, 200.0), rng.uniform(40.0, 200.0),
         rng.uniform(40.0, 200.0)};
  MeasurementSession session;
  session.snapshots.push_back({subject, {Roi{2, 2, 10}}});

  WienerOptions opts;
  opts.ridge_scale = 0.0;
  const Spectrum base =
      aggregate_session(session, wiener_tm(samples, chart, opts));

  for (double g : {0.5, 0.8, 1.25, 2.0}) {
    ChartSamples scaled = samples;
    for (auto& s : scaled.samples) {
      s.rgb.r *= g;
      s.rgb.g *= g;
      s.rgb.b *= g;
    }
    RgbImage subject_g = subject;
    for (auto& p : subject_g.pixels) {
      p.r *= g;
      p.g *= g;
      p.b *= g;
    }
    MeasurementSession session_g;
    session_g.snapshots.push_back({subject_g, {Roi{2, 2, 10}}});
    const Spectrum out =
        aggregate_session(session_g, wiener_tm(scaled, chart, opts));
    for (std::size_t b = 0; b < 27; ++b)
      CHECK(std::abs(out[b] - base[b]) < 1e-9);
  }
}

TEST_CASE("roi quality policy verdicts") {
  const RoiQualityPolicy policy;
  RgbImage image(20, 20);
  const Roi roi{0, 0, 10};

  for (auto& p : image.pixels) p = {255.0, 255.0, 255.0};
  CHECK(check_roi_quality(image, roi, policy) == RoiVerdict::Reject);

  for (auto& p : image.pixels) p = {0.0, 0.0, 0.0};
  CHECK(check_roi_quality(image, roi, policy) == RoiVerdict::Reject);

  for (auto& p : image.pixels) p = {150.0, 150.0, 150.0};
  CHECK(check_roi_quality(image, roi, policy) == RoiVerdict::Accept);

  // 2% saturated pixels above the 1% cutoff
  image.at(0, 0) = {255.0, 10.0, 10.0};
  image.at(1, 0) = {255.0, 10.0, 10.0};
  CHECK(check_roi_quality(image, roi, policy) == RoiVerdict::Reject);
}

TEST_CASE("cube roi quality reads reflectance through the 0-255 scale") {
  const RoiQualityPolicy policy;
  SpectralCube cube(10, 10, WavelengthGrid::default_grid());
  const Roi roi{0, 0, 10};

  for (double& v : cube.data()) v = 0.6;  // mean max 153
  CHECK(check_roi_quality(cube, roi, policy) == RoiVerdict::Accept);

  for (double& v : cube.data()) v = 0.05;  // mean max 12.75, under-illuminated
  CHECK(check_roi_quality(cube, roi, policy) == RoiVerdict::Reject);

  for (double& v : cube.data()) v = 0.98;  // mean max 249.9, hyper-reflective
  CHECK(check_roi_quality(cube, roi, policy) == RoiVerdict::Reject);
}

TEST_CASE("reflectance_reduction") {
  const WavelengthGrid& g = WavelengthGrid::default_grid();
  std::vector<double> rv(27, 0.8), sv(27, 0.8);
  const Spectrum ref(g, rv);
  CHECK(reflectance_reduction(ref, ref, 460.0) == 0.0);

  sv[g.exact_band(460.0)] = 0.4;
  CHECK(reflectance_reduction(Spectrum(g, sv), ref, 460.0) ==
        doctest::Approx(0.5));

  std::vector<double> zero(27, 0.0);
  CHECK_THROWS_AS(reflectance_reduction(ref, Spectrum(g, zero), 460.0),
                  DegenerateNormalizer);
}

TEST_CASE("460 nm reduction tracks concentration linearly on the log scale") {
  // the reduction itself saturates exponentially toward 1, so the linear
  // relationship lives in -ln(1 - reduction), the optical absorbance
  const double concs[] = {0.0, 0.23, 0.47, 0.94, 1.88, 3.75, 7.50, 15.0, 30.0};
  PhantomSpec zero;
  const Spectrum ref = normalize_at(phantom_reflectance(zero), 680.0);

  std::vector<double> xs, ys;
  double prev = -1.0;
  for (double c : concs) {
    PhantomSpec spec;
    spec.bilirubin_mg_dl = c;
    const Spectrum s = normalize_at(phantom_reflectance(spec), 680.0);
    const double reduction = reflectance_reduction(s, ref, 460.0);
    CHECK(reduction > prev);  // strictly increasing with concentration
    prev = reduction;
    xs.push_back(c);
    ys.push_back(-std::log(1.0 - reduction));
  }
  // least-squares line and its R^2
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  CHECK(r2 >= 0.99);
}

TEST_CASE("two_band_index") {
  CHECK(two_band_index(Spectrum::constant(0.7)) == doctest::Approx(1.0));

  const WavelengthGrid& g = WavelengthGrid::default_grid();
  std::vector<double> v(27, 0.5);
  v[g.exact_band(460.0)] = 0.3;
  v[g.exact_band(500.0)] = 0.6;
  CHECK(two_band_index(Spectrum(g, v)) == doctest::Approx(0.5));

  std::vector<double> z(27, 0.0);
  CHECK_THROWS_AS(two_band_index(Spectrum(g, z)), DegenerateNormalizer);

  // strictly decreasing across the phantom concentration series
  const double concs[] = {0.0, 0.23, 0.47, 0.94, 1.88, 3.75, 7.50, 15.0, 30.0};
  double prev = 1e300;
  for (double c : concs) {
    PhantomSpec spec;
    spec.bilirubin_mg_dl = c;
    const double idx = two_band_index(phantom_reflectance(spec));
    CHECK(idx < prev);
    prev = idx;
  }
}
