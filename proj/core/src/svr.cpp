#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "speccam/error.hpp"
#include "speccam/regression.hpp"

namespace speccam {

namespace {

// SMO on the 2n-variable dual of epsilon-SVR: minimize
// 1/2 a^T Q a + p^T a, 0 <= a <= C, sum y_a a = 0, with maximal violating
// pair selection. Targets are standardized by the caller, so C and epsilon
// come in already scaled by std(y).
struct Smo {
  std::size_t n;
  const std::vector<double>& kernel;  // n x n
  double c;
  long max_iter;
  double tol;

  std::vector<double> alpha;  // 2n
  std::vector<double> grad;   // 2n

  double sign(std::size_t a) const { return a < n ? 1.0 : -1.0; }
  double q(std::size_t a, std::size_t b) const {
    return sign(a) * sign(b) * kernel[(a % n) * n + (b % n)];
  }

  void solve(const std::vector<double>& y, double eps) {
    const std::size_t l = 2 * n;
    alpha.assign(l, 0.0);
    grad.resize(l);
    for (std::size_t a = 0; a < l; ++a)
      grad[a] = a < n ? eps - y[a] : eps + y[a - n];

    for (long iter = 0;; ++iter) {
      if (iter >= max_iter)
        throw TrainingDiverged("svr smo exceeded max iterations");

      // maximal violating pair
      double gmax = -std::numeric_limits<double>::infinity();
      double gmin = std::numeric_limits<double>::infinity();
      std::size_t i = l, j = l;
      for (std::size_t a = 0; a < l; ++a) {
        const double ya = sign(a);
        const bool in_up = (ya > 0 && alpha[a] < c) || (ya < 0 && alpha[a] > 0);
        const bool in_low = (ya > 0 && alpha[a] > 0) || (ya < 0 && alpha[a] < c);
        const double v = -ya * grad[a];
        if (in_up && v > gmax) {
          gmax = v;
          i = a;
        }
        if (in_low && v < gmin) {
          gmin = v;
          j = a;
        }
      }
      if (i == l || j == l || gmax - gmin <= tol) break;

      const double yi = sign(i), yj = sign(j);
      const double old_i = alpha[i], old_j = alpha[j];
      if (yi != yj) {
        double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
        if (quad <= 0.0) quad = 1e-12;
        const double delta = (-grad[i] - grad[j]) / quad;
        const double diff = alpha[i] - alpha[j];
        alpha[i] += delta;
        alpha[j] += delta;
        if (diff > 0) {
          if (alpha[j] < 0) {
            alpha[j] = 0;
            alpha[i] = diff;
          }
          if (alpha[i] > c) {
            alpha[i] = c;
            alpha[j] = c - diff;
          }
        } else {
          if (alpha[i] < 0) {
            alpha[i] = 0;
            alpha[j] = -diff;
          }
          if (alpha[j] > c) {
            alpha[j] = c;
            alpha[i] = c + diff;
          }
        }
      } else {
        double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
        if (quad <= 0.0) quad = 1e-12;
        const double delta = (grad[i] - grad[j]) / quad;
        const double sum = alpha[i] + alpha[j];
        alpha[i] -= delta;
        alpha[j] += delta;
        if (sum > c) {
          if (alpha[i] > c) {
            alpha[i] = c;
            alpha[j] = sum - c;
          }
          if (alpha[j] > c) {
            alpha[j] = c;
            alpha[i] = sum - c;
          }
        } else {
          if (alpha[j] < 0) {
            alpha[j] = 0;
            alpha[i] = sum;
          }
          if (alpha[i] < 0) {
            alpha[i] = 0;
            alpha[j] = sum;
          }
        }
      }

      const double di = alpha[i] - old_i;
      const double dj = alpha[j] - old_j;
      if (di == 0.0 && dj == 0.0) break;  // numerically stuck at the bound
      for (std::size_t a = 0; a < l; ++a)
        grad[a] += q(a, i) * di + q(a, j) * dj;
    }
  }

  double rho() const {
    const std::size_t l = 2 * n;
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t nr_free = 0;
    for (std::size_t a = 0; a < l; ++a) {
      const double yg = sign(a) * grad[a];
      if (alpha[a] >= c) {
        if (sign(a) < 0)
          ub = std::min(ub, yg);
        else
          lb = std::max(lb, yg);
      } else if (alpha[a] <= 0.0) {
        if (sign(a) > 0)
          ub = std::min(ub, yg);
        else
          lb = std::max(lb, yg);
      } else {
        sum_free += yg;
        ++nr_free;
      }
    }
    return nr_free > 0 ? sum_free / static_cast<double>(nr_free)
                       : (ub + lb) / 2.0;
  }
};

}  // namespace

TrainedModel train_svr(const TrainingSet& ts, const ModelSpec& spec) {
  if (ts.size() < 2) throw EmptyInput("svr needs >= 2 rows");
  const SvrConfig& cfg = spec.svr;
  const std::size_t n = ts.size();
  const std::size_t d = ts.dim();

  TrainedModel m;
  m.spec = spec;
  m.spec.kind = ModelKind::Svr;
  m.mode = ts.mode;
  m.standardizer = standardize_fit(ts.x);

  std::vector<std::vector<double>> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = m.standardizer.apply(ts.x[i]);

  SvrModel svr;
  svr.gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / static_cast<double>(d);
  svr.y_mean = std::accumulate(ts.y.begin(), ts.y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : ts.y) ss += (v - svr.y_mean) * (v - svr.y_mean);
  svr.y_std = std::sqrt(ss / std::max<std::size_t>(1, n - 1));
  if (svr.y_std <= 0.0) svr.y_std = 1.0;

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = (ts.y[i] - svr.y_mean) / svr.y_std;

  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        const double df = xs[i][f] - xs[j][f];
        d2 += df * df;
      }
      kernel[i * n + j] = kernel[j * n + i] = std::exp(-svr.gamma * d2);
    }
  }

  // std(y) == 1 after standardization, so the scales apply directly
  Smo smo{n, kernel, cfg.c_scale, cfg.max_iter, cfg.tol, {}, {}};
  smo.solve(y, cfg.eps_scale);

  svr.bias = -smo.rho();
  for (std::size_t i = 0; i < n; ++i) {
    const double beta = smo.alpha[i] - smo.alpha[i + n];
    if (beta != 0.0) {
      svr.support_x.push_back(xs[i]);
      svr.beta.push_back(beta);
    }
  }
  m.state = std::move(svr);
  return m;
}

}  // namespace speccam
