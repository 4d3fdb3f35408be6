#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "speccam/phantom.hpp"
#include "speccam/regression.hpp"
#include "speccam/spectral.hpp"

namespace speccam {

// (truth, prediction) pairs in umol/L.
using PredictionPairs = std::vector<std::pair<double, double>>;

struct AgreementReport {
  double r = 0.0;
  double p_value = 1.0;
  double md = 0.0;        // mean difference, prediction - truth
  double std_md = 0.0;    // sample std (n-1)
  double loa_upper = 0.0; // md + 1.96 std_md
  double loa_lower = 0.0;
};

struct RocReport {
  double threshold = 0.0;
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
  double auroc = 0.5;
};

struct LearningCurvePoint {
  double fraction = 0.0;
  std::size_t n = 0;
  double r = 0.0;
  double md = 0.0;
  double std_md = 0.0;
};

struct LearningCurve {
  std::vector<LearningCurvePoint> sal;
  std::vector<LearningCurvePoint> rgbl;
};

struct StabilitySummary {
  // sample std of each index across the curve fractions
  double sal_std_r = 0.0, sal_std_md = 0.0, sal_std_stdmd = 0.0;
  double rgbl_std_r = 0.0, rgbl_std_md = 0.0, rgbl_std_stdmd = 0.0;
};

// Sample Pearson r and two-tailed p from t = r*sqrt((n-2)/(1-r^2)).
// Throws UndefinedCorrelation on constant columns or n < 3.
std::pair<double, double> pearson(const PredictionPairs& pairs);

// Differences are prediction - truth; LOA = md +- 1.96*std_md. r/p are
// filled when n >= 3 and both columns vary, NaN otherwise.
AgreementReport bland_altman(const PredictionPairs& pairs);

// Positive iff truth > threshold (strict); score = prediction; AUROC via
// the trapezoid rule over the tie-grouped sweep.
RocReport roc(const PredictionPairs& pairs, double threshold);

// OLS prediction-vs-truth with the standard 95% prediction band.
struct PredictionBand {
  double slope = 0.0, intercept = 0.0;
  double resid_se = 0.0, x_mean = 0.0, sxx = 0.0;
  std::size_t n = 0;
  double t_crit = 0.0;

  std::pair<double, double> at(double x) const;  // (low, high)
};
PredictionBand prediction_band_95(const PredictionPairs& pairs);

struct LearningCurveOptions {
  std::vector<double> fractions;  // default 0.125 .. 1.0 step 0.0625
  std::size_t folds = 10;
  bool parallel = true;
};
std::vector<double> default_fractions();

// One shared resample per fraction (identical record ids for SAL and
// RGBL), then k-fold CV per feature mode.
LearningCurve learning_curve(const SyntheticDataset& dataset,
                             const ModelSpec& sal_spec,
                             const ModelSpec& rgbl_spec,
                             const LearningCurveOptions& options,
                             std::uint64_t seed);

StabilitySummary stability_summary(const LearningCurve& curve);

// Root mean squared per-band difference. Throws GridMismatch.
double spectral_rmse(const Spectrum& reconstructed, const Spectrum& reference);

// Feature extraction used by evaluate/learning-curve: SAL takes the 27
// bands, RGBL the RGB triple.
TrainingSet dataset_features(const SyntheticDataset& dataset, FeatureMode mode);
TrainingSet dataset_features(const SyntheticDataset& dataset, FeatureMode mode,
                             const std::vector<std::size_t>& rows);

}  // namespace speccam
