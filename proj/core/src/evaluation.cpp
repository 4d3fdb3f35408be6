#include "speccam/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "speccam/error.hpp"
#include "speccam/stats.hpp"

namespace speccam {

std::pair<double, double> pearson(const PredictionPairs& pairs) {
  const std::size_t n = pairs.size();
  if (n < 3) throw UndefinedCorrelation("need >= 3 pairs");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw UndefinedCorrelation("a column is constant");
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  double p;
  if (std::abs(r) >= 1.0) {
    p = 0.0;
  } else {
    const double t = r * std::sqrt(dof / (1.0 - r * r));
    p = t_two_tailed_p(t, dof);
  }
  return {r, p};
}

AgreementReport bland_altman(const PredictionPairs& pairs) {
  if (pairs.size() < 2) throw EmptyInput("bland_altman needs >= 2 pairs");
  std::vector<double> diff;
  diff.reserve(pairs.size());
  for (const auto& [truth, pred] : pairs) diff.push_back(pred - truth);
  AgreementReport rep;
  rep.md = sample_mean(diff);
  rep.std_md = sample_std(diff);
  rep.loa_upper = rep.md + 1.96 * rep.std_md;
  rep.loa_lower = rep.md - 1.96 * rep.std_md;
  try {
    std::tie(rep.r, rep.p_value) = pearson(pairs);
  } catch (const UndefinedCorrelation&) {
    rep.r = std::numeric_limits<double>::quiet_NaN();
    rep.p_value = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

RocReport roc(const PredictionPairs& pairs, double threshold) {
  std::size_t pos = 0, neg = 0;
  for (const auto& [truth, pred] : pairs)
    (truth > threshold ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    throw DegenerateRoc("both classes required after thresholding");

  std::vector<std::pair<double, bool>> scored;  // (score, positive)
  scored.reserve(pairs.size());
  for (const auto& [truth, pred] : pairs)
    scored.emplace_back(pred, truth > threshold);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocReport rep;
  rep.threshold = threshold;
  rep.points.emplace_back(0.0, 0.0);
  double auroc = 0.0;
  std::size_t tp = 0, fp = 0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    // group tied scores so ties contribute a diagonal segment (area 1/2)
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) {
      (scored[j].second ? tp : fp) += 1;
      ++j;
    }
    i = j;
    const double fpr = static_cast<double>(fp) / neg;
    const double tpr = static_cast<double>(tp) / pos;
    auroc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    rep.points.emplace_back(fpr, tpr);
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  rep.auroc = auroc;
  return rep;
}

std::pair<double, double> PredictionBand::at(double x) const {
  const double fit = intercept + slope * x;
  const double half =
      t_crit * resid_se *
      std::sqrt(1.0 + 1.0 / static_cast<double>(n) +
                (x - x_mean) * (x - x_mean) / sxx);
  return {fit - half, fit + half};
}

PredictionBand prediction_band_95(const PredictionPairs& pairs) {
  const std::size_t n = pairs.size();
  if (n < 4) throw UndefinedRegression("need >= 4 pairs");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw UndefinedRegression("truth column is constant");

  PredictionBand band;
  band.n = n;
  band.x_mean = mx;
  band.sxx = sxx;
  band.slope = sxy / sxx;
  band.intercept = my - band.slope * mx;
  double rss = 0.0;
  for (const auto& [x, y] : pairs) {
    const double e = y - (band.intercept + band.slope * x);
    rss += e * e;
  }
  band.resid_se = std::sqrt(rss / static_cast<double>(n - 2));
  band.t_crit = t_quantile(0.975, static_cast<double>(n - 2));
  return band;
}

std::vector<double> default_fractions() {
  std::vector<double> f;
  for (int i = 2; i <= 16; ++i) f.push_back(i * 0.0625);  // 0.125 .. 1.0
  return f;
}

TrainingSet dataset_features(const SyntheticDataset& dataset,
                             FeatureMode mode) {
  std::vector<std::size_t> rows(dataset.records.size());
  std::iota(rows.begin(), rows.end(), 0);
  return dataset_features(dataset, mode, rows);
}

TrainingSet dataset_features(const SyntheticDataset& dataset, FeatureMode mode,
                             const std::vector<std::size_t>& rows) {
  TrainingSet ts;
  ts.mode = mode;
  ts.x.reserve(rows.size());
  ts.y.reserve(rows.size());
  for (std::size_t i : rows) {
    const DatasetRecord& rec = dataset.records[i];
    if (mode == FeatureMode::Sal)
      ts.x.push_back(rec.spectrum.values());
    else
      ts.x.push_back({rec.rgb.r, rec.rgb.g, rec.rgb.b});
    ts.y.push_back(rec.bbl_umol_l);
  }
  return ts;
}

namespace {

LearningCurvePoint curve_point(const SyntheticDataset& dataset,
                               const std::vector<std::size_t>& rows,
                               FeatureMode mode, const ModelSpec& spec,
                               std::size_t folds, std::uint64_t fold_seed,
                               double fraction) {
  const TrainingSet ts = dataset_features(dataset, mode, rows);
  const auto pairs = cross_validated_predictions(ts, spec, folds, fold_seed);
  const AgreementReport rep = bland_altman(pairs);
  return {fraction, rows.size(), rep.r, rep.md, rep.std_md};
}

}  // namespace

LearningCurve learning_curve(const SyntheticDataset& dataset,
                             const ModelSpec& sal_spec,
                             const ModelSpec& rgbl_spec,
                             const LearningCurveOptions& options,
                             std::uint64_t seed) {
  const std::vector<double> fractions =
      options.fractions.empty() ? default_fractions() : options.fractions;
  const std::size_t n = dataset.records.size();

  auto run_fraction = [&](std::size_t fi) {
    const double fraction = fractions[fi];
    const std::uint64_t fseed = derive_seed(seed, "fraction", fi);
    // shared row subset: SAL and RGBL see identical record ids
    const auto rows = resample_fraction(n, fraction, fseed);
    LearningCurvePoint sal =
        curve_point(dataset, rows, FeatureMode::Sal, sal_spec, options.folds,
                    derive_seed(fseed, "cv-sal"), fraction);
    LearningCurvePoint rgbl =
        curve_point(dataset, rows, FeatureMode::Rgbl, rgbl_spec, options.folds,
                    derive_seed(fseed, "cv-rgbl"), fraction);
    return std::make_pair(sal, rgbl);
  };

  LearningCurve curve;
  curve.sal.resize(fractions.size());
  curve.rgbl.resize(fractions.size());
  if (options.parallel) {
    std::vector<std::future<std::pair<LearningCurvePoint, LearningCurvePoint>>>
        futures;
    futures.reserve(fractions.size());
    for (std::size_t fi = 0; fi < fractions.size(); ++fi)
      futures.push_back(
          std::async(std::launch::async, run_fraction, fi));
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      auto [sal, rgbl] = futures[fi].get();
      curve.sal[fi] = sal;
      curve.rgbl[fi] = rgbl;
    }
  } else {
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      auto [sal, rgbl] = run_fraction(fi);
      curve.sal[fi] = sal;
      curve.rgbl[fi] = rgbl;
    }
  }
  return curve;
}

StabilitySummary stability_summary(const LearningCurve& curve) {
  if (curve.sal.size() < 2 || curve.rgbl.size() < 2)
    throw EmptyInput("stability summary needs >= 2 fractions");
  auto collect = [](const std::vector<LearningCurvePoint>& pts, auto member) {
    std::vector<double> v;
    v.reserve(pts.size());
    for (const auto& p : pts) v.push_back(p.*member);
    return sample_std(v);
  };
  StabilitySummary s;
  s.sal_std_r = collect(curve.sal, &LearningCurvePoint::r);
  s.sal_std_md = collect(curve.sal, &LearningCurvePoint::md);
  s.sal_std_stdmd = collect(curve.sal, &LearningCurvePoint::std_md);
  s.rgbl_std_r = collect(curve.rgbl, &LearningCurvePoint::r);
  s.rgbl_std_md = collect(curve.rgbl, &LearningCurvePoint::md);
  s.rgbl_std_stdmd = collect(curve.rgbl, &LearningCurvePoint::std_md);
  return s;
}

double spectral_rmse(const Spectrum& reconstructed, const Spectrum& reference) {
  if (!(reconstructed.grid() == reference.grid()))
    throw GridMismatch("spectral_rmse grids differ");
  double ss = 0.0;
  for (std::size_t b = 0; b < reconstructed.size(); ++b) {
    const double d = reconstructed[b] - reference[b];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(reconstructed.size()));
}

}  // namespace speccam
