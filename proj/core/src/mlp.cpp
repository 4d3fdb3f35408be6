#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "speccam/error.hpp"
#include "speccam/regression.hpp"

namespace speccam {

MlpNet::MlpNet(std::size_t input_dim, int hidden_layers, int width)
    : input_dim_(input_dim) {
  if (hidden_layers < 1 || width < 1)
    throw BadHyperparameter("mlp needs >= 1 hidden layer and width >= 1");
  for (int l = 0; l < hidden_layers; ++l)
    layer_sizes_.push_back(static_cast<std::size_t>(width));
  layer_sizes_.push_back(1);
  std::size_t fan_in = input_dim_;
  for (std::size_t out : layer_sizes_) {
    weights_.emplace_back(out * fan_in, 0.0);
    biases_.emplace_back(out, 0.0);
    fan_in = out;
  }
}

void MlpNet::init_weights(Rng& rng) {
  std::size_t fan_in = input_dim_;
  for (std::size_t l = 0; l < layer_sizes_.size(); ++l) {
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (double& w : weights_[l]) w = scale * rng.normal();
    for (double& b : biases_[l]) b = 0.0;
    fan_in = layer_sizes_[l];
  }
}

double MlpNet::forward(const std::vector<double>& x) const {
  std::vector<double> act(x);
  std::vector<double> next;
  std::size_t fan_in = input_dim_;
  for (std::size_t l = 0; l < layer_sizes_.size(); ++l) {
    const std::size_t out = layer_sizes_[l];
    next.assign(out, 0.0);
    const bool last = l + 1 == layer_sizes_.size();
    for (std::size_t o = 0; o < out; ++o) {
      double z = biases_[l][o];
      const double* w = weights_[l].data() + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) z += w[i] * act[i];
      next[o] = last ? z : std::max(0.0, z);
    }
    act.swap(next);
    fan_in = out;
  }
  return act[0];
}

double MlpNet::loss_and_gradient(
    const std::vector<const std::vector<double>*>& xs,
    const std::vector<double>& ys, std::vector<double>& grad) const {
  grad.assign(param_count(), 0.0);
  const std::size_t layers = layer_sizes_.size();
  const double inv_n = 1.0 / static_cast<double>(xs.size());

  // per-layer gradient offsets in the flat vector
  std::vector<std::size_t> w_off(layers), b_off(layers);
  {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      w_off[l] = off;
      off += weights_[l].size();
      b_off[l] = off;
      off += biases_[l].size();
    }
  }

  double loss = 0.0;
  std::vector<std::vector<double>> acts(layers + 1);
  std::vector<std::vector<double>> pre(layers);
  for (std::size_t s = 0; s < xs.size(); ++s) {
    acts[0] = *xs[s];
    std::size_t fan_in = input_dim_;
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t out = layer_sizes_[l];
      pre[l].assign(out, 0.0);
      acts[l + 1].assign(out, 0.0);
      const bool last = l + 1 == layers;
      for (std::size_t o = 0; o < out; ++o) {
        double z = biases_[l][o];
        const double* w = weights_[l].data() + o * fan_in;
        for (std::size_t i = 0; i < fan_in; ++i) z += w[i] * acts[l][i];
        pre[l][o] = z;
        acts[l + 1][o] = last ? z : std::max(0.0, z);
      }
      fan_in = out;
    }
    const double err = acts[layers][0] - ys[s];
    loss += err * err * inv_n;

    // backward: d(MSE)/d(output) = 2*err/n
    std::vector<double> delta{2.0 * err * inv_n};
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t out = layer_sizes_[l];
      const std::size_t in = l == 0 ? input_dim_ : layer_sizes_[l - 1];
      std::vector<double> prev_delta(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        grad[b_off[l] + o] += d;
        double* gw = grad.data() + w_off[l] + o * in;
        const double* w = weights_[l].data() + o * in;
        const double* a = acts[l].data();
        for (std::size_t i = 0; i < in; ++i) {
          gw[i] += d * a[i];
          prev_delta[i] += d * w[i];
        }
      }
      if (l > 0) {
        for (std::size_t i = 0; i < in; ++i)
          if (pre[l - 1][i] <= 0.0) prev_delta[i] = 0.0;
        delta.swap(prev_delta);
      }
    }
  }
  return loss;
}

std::vector<double> MlpNet::params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (std::size_t l = 0; l < layer_sizes_.size(); ++l) {
    flat.insert(flat.end(), weights_[l].begin(), weights_[l].end());
    flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
  }
  return flat;
}

void MlpNet::set_params(const std::vector<double>& flat) {
  if (flat.size() != param_count())
    throw BadHyperparameter("flat parameter vector has wrong length");
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer_sizes_.size(); ++l) {
    std::copy_n(flat.begin() + off, weights_[l].size(), weights_[l].begin());
    off += weights_[l].size();
    std::copy_n(flat.begin() + off, biases_[l].size(), biases_[l].begin());
    off += biases_[l].size();
  }
}

std::size_t MlpNet::param_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l < layer_sizes_.size(); ++l)
    count += weights_[l].size() + biases_[l].size();
  return count;
}

void MlpNet::set_layers(std::vector<std::vector<double>> weights,
                        std::vector<std::vector<double>> biases,
                        std::vector<std::size_t> layer_sizes,
                        std::size_t input_dim) {
  weights_ = std::move(weights);
  biases_ = std::move(biases);
  layer_sizes_ = std::move(layer_sizes);
  input_dim_ = input_dim;
}

TrainedModel train_mlp(const TrainingSet& ts, const ModelSpec& spec) {
  if (ts.size() < 10) throw EmptyInput("mlp needs >= 10 rows");
  const MlpConfig& cfg = spec.mlp;

  TrainedModel m;
  m.spec = spec;
  m.spec.kind = ModelKind::Mlp;
  m.mode = ts.mode;
  m.standardizer = standardize_fit(ts.x);

  std::vector<std::vector<double>> xs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    xs[i] = m.standardizer.apply(ts.x[i]);

  MlpModel mlp;
  mlp.y_mean = std::accumulate(ts.y.begin(), ts.y.end(), 0.0) / ts.size();
  double ss = 0.0;
  for (double v : ts.y) ss += (v - mlp.y_mean) * (v - mlp.y_mean);
  mlp.y_std = std::sqrt(ss / std::max<std::size_t>(1, ts.size() - 1));
  if (mlp.y_std <= 0.0) mlp.y_std = 1.0;
  std::vector<double> ys(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    ys[i] = (ts.y[i] - mlp.y_mean) / mlp.y_std;

  Rng rng(derive_seed(spec.seed, "mlp-init"));
  mlp.net = MlpNet(ts.dim(), cfg.hidden_layers, cfg.width);
  mlp.net.init_weights(rng);

  // Adam
  const std::size_t pcount = mlp.net.param_count();
  std::vector<double> params = mlp.net.params();
  std::vector<double> m1(pcount, 0.0), m2(pcount, 0.0), grad;
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  long step = 0;

  std::vector<std::size_t> order(ts.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(spec.seed, "mlp-shuffle"));

  double prev_loss = std::numeric_limits<double>::infinity();
  int plateau = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.index(i + 1)]);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<const std::vector<double>*> bx;
      std::vector<double> by;
      bx.reserve(stop - start);
      by.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        bx.push_back(&xs[order[i]]);
        by.push_back(ys[order[i]]);
      }
      const double loss = mlp.net.loss_and_gradient(bx, by, grad);
      if (!std::isfinite(loss)) throw TrainingDiverged("mlp loss not finite");
      epoch_loss += loss;
      ++batches;
      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < pcount; ++p) {
        m1[p] = beta1 * m1[p] + (1.0 - beta1) * grad[p];
        m2[p] = beta2 * m2[p] + (1.0 - beta2) * grad[p] * grad[p];
        params[p] -= cfg.learning_rate * (m1[p] / bc1) /
                     (std::sqrt(m2[p] / bc2) + adam_eps);
      }
      mlp.net.set_params(params);
    }
    epoch_loss /= static_cast<double>(batches);
    const double rel = std::abs(prev_loss - epoch_loss) /
                       std::max(epoch_loss, 1e-12);
    plateau = rel < cfg.plateau_rel_tol ? plateau + 1 : 0;
    if (plateau >= cfg.plateau_patience) break;
    prev_loss = epoch_loss;
  }

  m.state = std::move(mlp);
  return m;
}

}  // namespace speccam
