#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "speccam/error.hpp"
#include "speccam/regression.hpp"

namespace speccam {

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& y;
  int min_leaf;
  int features_per_split;
  Rng& rng;
  std::vector<TreeNode> nodes;

  int build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi) {
    const std::size_t count = hi - lo;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += y[idx[i]];
    const double mean = sum / static_cast<double>(count);

    const int node_id = static_cast<int>(nodes.size());
    nodes.push_back({-1, 0.0, -1, -1, mean});
    if (count < 2 * static_cast<std::size_t>(min_leaf)) return node_id;

    double sse = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = y[idx[i]] - mean;
      sse += d * d;
    }
    if (sse <= 0.0) return node_id;

    const std::size_t d = x.front().size();
    std::vector<std::size_t> feats(d);
    std::iota(feats.begin(), feats.end(), 0);
    const std::size_t m = std::min<std::size_t>(
        d, static_cast<std::size_t>(features_per_split));
    for (std::size_t i = 0; i < m; ++i)
      std::swap(feats[i], feats[i + rng.index(d - i)]);
    feats.resize(m);

    // best split by SSE reduction over the sampled features
    int best_feat = -1;
    double best_thresh = 0.0;
    double best_score = sse;
    std::vector<std::size_t> local(idx.begin() + lo, idx.begin() + hi);
    for (std::size_t f : feats) {
      std::sort(local.begin(), local.end(), [&](std::size_t a, std::size_t b) {
        return x[a][f] < x[b][f] || (x[a][f] == x[b][f] && a < b);
      });
      double left_sum = 0.0, left_sq = 0.0;
      double right_sum = sum, right_sq = 0.0;
      for (std::size_t i = lo; i < hi; ++i)
        right_sq += y[idx[i]] * y[idx[i]];
      for (std::size_t i = 0; i + 1 < count; ++i) {
        const double yi = y[local[i]];
        left_sum += yi;
        left_sq += yi * yi;
        right_sum -= yi;
        right_sq -= yi * yi;
        const std::size_t nl = i + 1, nr = count - nl;
        if (x[local[i]][f] == x[local[i + 1]][f]) continue;
        if (nl < static_cast<std::size_t>(min_leaf) ||
            nr < static_cast<std::size_t>(min_leaf))
          continue;
        const double score = (left_sq - left_sum * left_sum / nl) +
                             (right_sq - right_sum * right_sum / nr);
        if (score < best_score - 1e-12) {
          best_score = score;
          best_feat = static_cast<int>(f);
          best_thresh = (x[local[i]][f] + x[local[i + 1]][f]) / 2.0;
        }
      }
    }
    if (best_feat < 0) return node_id;

    auto mid = std::partition(idx.begin() + lo, idx.begin() + hi,
                              [&](std::size_t a) {
                                return x[a][best_feat] <= best_thresh;
                              });
    const std::size_t split = static_cast<std::size_t>(mid - idx.begin());
    if (split == lo || split == hi) return node_id;

    nodes[node_id].feature = best_feat;
    nodes[node_id].threshold = best_thresh;
    nodes[node_id].left = build(idx, lo, split);
    nodes[node_id].right = build(idx, split, hi);
    return node_id;
  }
};

}  // namespace

TrainedModel train_rf(const TrainingSet& ts, const ModelSpec& spec) {
  if (ts.size() < 5) throw EmptyInput("rf needs >= 5 rows");
  const RfConfig& cfg = spec.rf;
  if (cfg.trees < 1 || cfg.min_leaf < 1)
    throw BadHyperparameter("rf trees and min_leaf must be >= 1");

  TrainedModel m;
  m.spec = spec;
  m.spec.kind = ModelKind::Rf;
  m.mode = ts.mode;
  m.standardizer = standardize_fit(ts.x);

  const std::size_t n = ts.size();
  const std::size_t d = ts.dim();
  std::vector<std::vector<double>> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = m.standardizer.apply(ts.x[i]);

  const int feats = cfg.features_per_split > 0
                        ? cfg.features_per_split
                        : static_cast<int>((d + 2) / 3);

  RfModel rf;
  rf.trees.reserve(cfg.trees);
  for (int t = 0; t < cfg.trees; ++t) {
    Rng rng(derive_seed(spec.seed, "rf-tree", static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> idx(n);
    if (cfg.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) idx[i] = rng.index(n);
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    TreeBuilder builder{xs, ts.y, cfg.min_leaf, feats, rng, {}};
    builder.build(idx, 0, n);
    rf.trees.push_back(std::move(builder.nodes));
  }
  m.state = std::move(rf);
  return m;
}

}  // namespace speccam
