#include "speccam/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speccam/error.hpp"

namespace speccam {

std::size_t feature_dim(FeatureMode mode) {
  return mode == FeatureMode::Sal ? 27 : 3;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
  if (x.size() != mean.size())
    throw FeatureModeMismatch("feature length differs from standardizer");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = stddev[i] > 0.0 ? (x[i] - mean[i]) / stddev[i] : 0.0;
  return out;
}

Standardizer standardize_fit(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw EmptyInput("standardize_fit needs >= 2 rows");
  const std::size_t d = rows.front().size();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  for (const auto& row : rows) {
    if (row.size() != d) throw FeatureModeMismatch("ragged feature rows");
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  }
  for (double& m : s.mean) m /= static_cast<double>(rows.size());
  for (const auto& row : rows)
    for (std::size_t j = 0; j < d; ++j) {
      const double dlt = row[j] - s.mean[j];
      s.stddev[j] += dlt * dlt;
    }
  for (double& v : s.stddev)
    v = std::sqrt(v / static_cast<double>(rows.size() - 1));
  return s;
}

namespace {

void check_training_set(const TrainingSet& ts, std::size_t min_rows) {
  if (ts.size() < min_rows) throw EmptyInput("training set too small");
  if (ts.x.size() != ts.y.size())
    throw FeatureModeMismatch("feature/target row counts differ");
}

double target_std(const std::vector<double>& y) {
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / std::max<std::size_t>(1, y.size() - 1));
}

}  // namespace

TrainedModel train_knn(const TrainingSet& ts, const ModelSpec& spec) {
  check_training_set(ts, 2);
  if (spec.knn.k < 1 || static_cast<std::size_t>(spec.knn.k) > ts.size())
    throw BadHyperparameter("knn k outside [1, n]");
  TrainedModel m;
  m.spec = spec;
  m.spec.kind = ModelKind::Knn;
  m.mode = ts.mode;
  m.standardizer = standardize_fit(ts.x);
  KnnModel knn;
  knn.k = spec.knn.k;
  knn.train_x.reserve(ts.size());
  for (const auto& row : ts.x) knn.train_x.push_back(m.standardizer.apply(row));
  knn.train_y = ts.y;
  m.state = std::move(knn);
  return m;
}

namespace {

double knn_predict(const KnnModel& knn, const std::vector<double>& x) {
  const std::size_t n = knn.train_x.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = knn.train_x[i][j] - x[j];
      d2 += d * d;
    }
    dist[i] = {d2, i};  // ties break toward the lower row index
  }
  const std::size_t k = static_cast<std::size_t>(knn.k);
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += knn.train_y[dist[i].second];
  return sum / static_cast<double>(k);
}

double rf_predict(const RfModel& rf, const std::vector<double>& x) {
  double sum = 0.0;
  for (const auto& tree : rf.trees) {
    int node = 0;
    while (tree[node].feature >= 0)
      node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left
                                                           : tree[node].right;
    sum += tree[node].value;
  }
  return sum / static_cast<double>(rf.trees.size());
}

double svr_predict(const SvrModel& svr, const std::vector<double>& x) {
  double sum = svr.bias;
  for (std::size_t i = 0; i < svr.support_x.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = svr.support_x[i][j] - x[j];
      d2 += d * d;
    }
    sum += svr.beta[i] * std::exp(-svr.gamma * d2);
  }
  return svr.y_mean + svr.y_std * sum;
}

}  // namespace

double TrainedModel::predict(const std::vector<double>& x) const {
  if (x.size() != feature_dim(mode))
    throw FeatureModeMismatch("query length differs from model feature mode");
  if (std::holds_alternative<HybridModel>(state)) {
    const auto& h = std::get<HybridModel>(state);
    double sum = 0.0;
    for (std::size_t i = 0; i < h.bases.size(); ++i)
      sum += h.weights[i] * h.bases[i]->predict(x);
    return sum;
  }
  const std::vector<double> z = standardizer.apply(x);
  if (std::holds_alternative<MlpModel>(state)) {
    const auto& m = std::get<MlpModel>(state);
    return m.y_mean + m.y_std * m.net.forward(z);
  }
  if (std::holds_alternative<SvrModel>(state))
    return svr_predict(std::get<SvrModel>(state), z);
  if (std::holds_alternative<KnnModel>(state))
    return knn_predict(std::get<KnnModel>(state), z);
  return rf_predict(std::get<RfModel>(state), z);
}

std::vector<double> nnls_small(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& target) {
  const std::size_t p = columns.size();
  const std::size_t n = target.size();
  if (p == 0 || p > 20) throw BadHyperparameter("nnls_small expects 1..20 columns");

  auto solve_subset = [&](const std::vector<std::size_t>& idx,
                          std::vector<double>& coef) -> bool {
    // normal equations with Gaussian elimination
    const std::size_t m = idx.size();
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t i = 0; i < n; ++i)
          a[r][c] += columns[idx[r]][i] * columns[idx[c]][i];
      for (std::size_t i = 0; i < n; ++i)
        a[r][m] += columns[idx[r]][i] * target[i];
    }
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (std::abs(a[piv][col]) < 1e-12) return false;
      std::swap(a[col], a[piv]);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = a[r][col] / a[col][col];
        for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
      }
    }
    coef.resize(m);
    for (std::size_t r = 0; r < m; ++r) coef[r] = a[r][m] / a[r][r];
    return true;
  };

  auto sse = [&](const std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double fit = 0.0;
      for (std::size_t j = 0; j < p; ++j) fit += w[j] * columns[j][i];
      const double r = target[i] - fit;
      total += r * r;
    }
    return total;
  };

  std::vector<double> best(p, 0.0);
  double best_sse = sse(best);
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < p; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    std::vector<double> coef;
    if (!solve_subset(idx, coef)) continue;
    if (std::any_of(coef.begin(), coef.end(), [](double c) { return c < 0.0; }))
      continue;
    std::vector<double> w(p, 0.0);
    for (std::size_t j = 0; j < idx.size(); ++j) w[idx[j]] = coef[j];
    const double s = sse(w);
    if (s < best_sse - 1e-12) {
      best_sse = s;
      best = w;
    }
  }
  return best;
}

TrainedModel train_hybrid(const TrainingSet& ts, const ModelSpec& spec) {
  check_training_set(ts, 20);
  auto base_spec = [&](ModelKind kind, const char* tag) {
    ModelSpec s = spec;
    s.kind = kind;
    s.seed = derive_seed(spec.seed, tag);
    return s;
  };

  HybridModel hybrid;
  if (spec.hybrid.stacked) {
    // stacking weights from inner 5-fold out-of-fold predictions, fit on
    // the training split only
    const std::size_t inner_k = std::min<std::size_t>(5, ts.size() / 4);
    const ModelKind kinds[4] = {ModelKind::Mlp, ModelKind::Svr, ModelKind::Knn,
                                ModelKind::Rf};
    const char* tags[4] = {"mlp", "svr", "knn", "rf"};
    std::vector<std::vector<double>> oof(4);
    for (int b = 0; b < 4; ++b) {
      auto pairs = cross_validated_predictions(
          ts, base_spec(kinds[b], tags[b]), inner_k,
          derive_seed(spec.seed, "stack-folds"));
      oof[b].reserve(pairs.size());
      for (const auto& pr : pairs) oof[b].push_back(pr.second);
    }
    auto w = nnls_small(oof, ts.y);
    const double total = w[0] + w[1] + w[2] + w[3];
    if (total > 0.0)
      for (double& v : w) v /= total;
    else
      w.assign(4, 0.25);
    hybrid.weights = {w[0], w[1], w[2], w[3]};
  }

  hybrid.bases = {
      std::make_shared<TrainedModel>(train_mlp(ts, base_spec(ModelKind::Mlp, "mlp"))),
      std::make_shared<TrainedModel>(train_svr(ts, base_spec(ModelKind::Svr, "svr"))),
      std::make_shared<TrainedModel>(train_knn(ts, base_spec(ModelKind::Knn, "knn"))),
      std::make_shared<TrainedModel>(train_rf(ts, base_spec(ModelKind::Rf, "rf")))};

  TrainedModel m;
  m.spec = spec;
  m.spec.kind = ModelKind::Hybrid;
  m.mode = ts.mode;
  m.state = std::move(hybrid);
  return m;
}

TrainedModel train(const TrainingSet& ts, const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Mlp: return train_mlp(ts, spec);
    case ModelKind::Svr: return train_svr(ts, spec);
    case ModelKind::Knn: return train_knn(ts, spec);
    case ModelKind::Rf: return train_rf(ts, spec);
    case ModelKind::Hybrid: return train_hybrid(ts, spec);
  }
  throw BadHyperparameter("unknown model kind");
}

FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw BadHyperparameter("k must be >= 2");
  if (n < k) throw BadHyperparameter("n must be >= k");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, "kfold"));
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.index(i + 1)]);

  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.assign(n, 0);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) fa.fold_of[perm[pos++]] = f;
  }
  return fa;
}

std::vector<std::pair<double, double>> cross_validated_predictions(
    const TrainingSet& ts, const ModelSpec& spec, std::size_t k,
    std::uint64_t seed) {
  const std::size_t n = ts.size();
  FoldAssignment fa = kfold_split(n, k, seed);
  std::vector<std::pair<double, double>> out(n);
  for (std::size_t f = 0; f < k; ++f) {
    TrainingSet train_split;
    train_split.mode = ts.mode;
    for (std::size_t i = 0; i < n; ++i) {
      if (fa.fold_of[i] == f) continue;
      train_split.x.push_back(ts.x[i]);
      train_split.y.push_back(ts.y[i]);
    }
    ModelSpec fold_spec = spec;
    fold_spec.seed = derive_seed(spec.seed, "fold", f);
    const TrainedModel model = train(train_split, fold_spec);
    for (std::size_t i = 0; i < n; ++i)
      if (fa.fold_of[i] == f) out[i] = {ts.y[i], model.predict(ts.x[i])};
  }
  return out;
}

std::vector<std::size_t> resample_fraction(std::size_t n, double fraction,
                                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw BadRange("fraction must be in (0, 1]");
  const std::size_t m =
      static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  if (m < 20) throw SubsetTooSmall("resampled subset below 20 rows");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(derive_seed(seed, "resample"));
  for (std::size_t i = 0; i < m; ++i)
    std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace speccam
