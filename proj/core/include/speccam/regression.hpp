#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "speccam/rng.hpp"

namespace speccam {

enum class FeatureMode { Sal, Rgbl };

// SAL carries 27 spectral bands, RGBL the 3 channel responses.
std::size_t feature_dim(FeatureMode mode);

struct TrainingSet {
  FeatureMode mode = FeatureMode::Sal;
  std::vector<std::vector<double>> x;  // rows, uniform length
  std::vector<double> y;               // bbl in umol/L

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }
};

// Per-feature (x - mean)/std with sample std (n-1); constant features map
// to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // 0 marks a constant feature

  std::vector<double> apply(const std::vector<double>& x) const;
};

Standardizer standardize_fit(const std::vector<std::vector<double>>& rows);

enum class ModelKind { Mlp, Svr, Knn, Rf, Hybrid };

struct MlpConfig {
  int hidden_layers = 10;
  int width = 16;
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 2000;
  double plateau_rel_tol = 1e-6;
  int plateau_patience = 8;
};

struct SvrConfig {
  // C = c_scale*std(y), epsilon = eps_scale*std(y), gamma 0 means 1/d.
  double c_scale = 10.0;
  double eps_scale = 0.05;
  double gamma = 0.0;
  double tol = 1e-3;
  long max_iter = 2000000;
};

struct KnnConfig {
  int k = 5;
};

struct RfConfig {
  int trees = 100;
  int min_leaf = 5;
  int features_per_split = 0;  // 0 means ceil(d/3)
  bool bootstrap = true;
};

struct HybridConfig {
  bool stacked = false;  // non-negative least-squares stacking weights
};

struct ModelSpec {
  ModelKind kind = ModelKind::Hybrid;
  std::uint64_t seed = 0;
  MlpConfig mlp;
  SvrConfig svr;
  KnnConfig knn;
  RfConfig rf;
  HybridConfig hybrid;
};

// ---- learned state ----

// Fully connected ReLU network, linear output. Exposed for gradient
// checking against finite differences.
class MlpNet {
 public:
  MlpNet() = default;
  MlpNet(std::size_t input_dim, int hidden_layers, int width);

  void init_weights(Rng& rng);  // He initialization

  double forward(const std::vector<double>& x) const;

  // Mean squared error over the batch plus gradient w.r.t. all parameters
  // (same flat layout as params()).
  double loss_and_gradient(const std::vector<const std::vector<double>*>& xs,
                           const std::vector<double>& ys,
                           std::vector<double>& grad) const;

  std::vector<double> params() const;
  void set_params(const std::vector<double>& flat);
  std::size_t param_count() const;

  std::size_t input_dim() const { return input_dim_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }
  void set_layers(std::vector<std::vector<double>> weights,
                  std::vector<std::vector<double>> biases,
                  std::vector<std::size_t> layer_sizes, std::size_t input_dim);
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }

 private:
  std::size_t input_dim_ = 0;
  std::vector<std::size_t> layer_sizes_;        // hidden widths then 1
  std::vector<std::vector<double>> weights_;    // per layer, row-major out x in
  std::vector<std::vector<double>> biases_;
};

struct MlpModel {
  MlpNet net;
  double y_mean = 0.0, y_std = 1.0;  // targets standardized during training
};

struct SvrModel {
  std::vector<std::vector<double>> support_x;  // standardized
  std::vector<double> beta;                    // alpha - alpha*
  double bias = 0.0;
  double gamma = 0.0;
  double y_mean = 0.0, y_std = 1.0;
};

struct KnnModel {
  std::vector<std::vector<double>> train_x;  // standardized
  std::vector<double> train_y;
  int k = 5;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  double value = 0.0;
};

struct RfModel {
  std::vector<std::vector<TreeNode>> trees;
};

class TrainedModel;

struct HybridModel {
  std::vector<std::shared_ptr<const TrainedModel>> bases;  // mlp, svr, knn, rf
  std::array<double, 4> weights = {0.25, 0.25, 0.25, 0.25};
};

class TrainedModel {
 public:
  ModelSpec spec;
  FeatureMode mode = FeatureMode::Sal;
  Standardizer standardizer;
  std::variant<MlpModel, SvrModel, KnnModel, RfModel, HybridModel> state;

  // Deterministic; throws FeatureModeMismatch on a wrong-length input.
  double predict(const std::vector<double>& x) const;
};

TrainedModel train(const TrainingSet& ts, const ModelSpec& spec);
TrainedModel train_mlp(const TrainingSet& ts, const ModelSpec& spec);
TrainedModel train_svr(const TrainingSet& ts, const ModelSpec& spec);
TrainedModel train_knn(const TrainingSet& ts, const ModelSpec& spec);
TrainedModel train_rf(const TrainingSet& ts, const ModelSpec& spec);
TrainedModel train_hybrid(const TrainingSet& ts, const ModelSpec& spec);

// Structured-text model files; KNN/RF/Hybrid weights round-trip exactly,
// MLP/SVR parameters at 17 significant digits.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text);

// ---- cross-validation and resampling ----

struct FoldAssignment {
  std::vector<std::size_t> fold_of;  // per-row fold index in [0, k)
  std::size_t k = 0;
};

// Uniform random permutation split into k near-equal folds.
FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// (truth, out-of-fold prediction) in input row order; every row predicted
// exactly once by a model that never saw it.
std::vector<std::pair<double, double>> cross_validated_predictions(
    const TrainingSet& ts, const ModelSpec& spec, std::size_t k,
    std::uint64_t seed);

// Sorted (order-preserving) uniform subset of round(fraction*n) indices.
std::vector<std::size_t> resample_fraction(std::size_t n, double fraction,
                                           std::uint64_t seed);

// Non-negative least squares for the stacking weights (exhaustive active
// set; the problem has only four variables).
std::vector<double> nnls_small(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& target);

}  // namespace speccam
