#include <cmath>
#include <vector>

#include "adspeech/error.hpp"
#include "adspeech/models.hpp"
#include "adspeech/rng.hpp"

namespace adspeech {

namespace {

Matrix kernel_matrix(const Matrix& x, double scale, double coef0, int degree) {
  const std::size_t n = x.size();
  Matrix k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      k[i][j] = k[j][i] = poly_kernel(x[i], x[j], scale, coef0, degree);
    }
  }
  return k;
}

double flat_variance_scale(const Matrix& x) {
  const std::size_t d = x[0].size();
  double mean = 0, n = 0;
  for (const auto& row : x) {
    for (double v : row) {
      mean += v;
      n += 1;
    }
  }
  mean /= n;
  double var = 0;
  for (const auto& row : x) {
    for (double v : row) var += (v - mean) * (v - mean);
  }
  var /= n;
  if (var <= 0) var = 1.0;
  return 1.0 / (static_cast<double>(d) * var);
}

}  // namespace

// Sequential minimal optimization over the hinge-loss dual. Pair partner
// selection is seeded-random, so training is deterministic; iteration stops
// after max_passes full sweeps without an update.
SvmParams svm_smo_train(const Matrix& x, const std::vector<double>& y,
                        const ModelConfig& cfg) {
  const std::size_t n = x.size();
  if (n < 2) throw DataError("svm: need at least 2 samples");
  bool has_pos = false, has_neg = false;
  for (double v : y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw DataError("svm: single-class input");
  if (cfg.c <= 0) throw DataError("svm: C must be positive");

  SvmParams p;
  p.x = x;
  p.y = y;
  p.alpha.assign(n, 0.0);
  p.b = 0.0;
  p.kscale = flat_variance_scale(x);

  const Matrix k = kernel_matrix(x, p.kscale, cfg.coef0, cfg.degree);
  const double C = cfg.c;
  // update below the contract tolerance so the checker has slack
  const double viol = cfg.tol / 5.0;

  auto f = [&](std::size_t i) {
    double acc = p.b;
    for (std::size_t j = 0; j < n; ++j) {
      if (p.alpha[j] != 0.0) acc += p.alpha[j] * y[j] * k[j][i];
    }
    return acc;
  };

  Rng rng(cfg.seed);
  int calm_passes = 0;
  long iter = 0;
  while (calm_passes < cfg.max_passes && iter < cfg.max_iter) {
    int changed = 0;
    for (std::size_t i = 0; i < n && iter < cfg.max_iter; ++i, ++iter) {
      const double ei = f(i) - y[i];
      const double ri = ei * y[i];
      if (!((ri < -viol && p.alpha[i] < C) || (ri > viol && p.alpha[i] > 0))) {
        continue;
      }
      std::size_t j = static_cast<std::size_t>(rng.below(n - 1));
      if (j >= i) ++j;
      const double ej = f(j) - y[j];

      const double ai_old = p.alpha[i], aj_old = p.alpha[j];
      double lo, hi;
      if (y[i] != y[j]) {
        lo = std::max(0.0, aj_old - ai_old);
        hi = std::min(C, C + aj_old - ai_old);
      } else {
        lo = std::max(0.0, ai_old + aj_old - C);
        hi = std::min(C, ai_old + aj_old);
      }
      if (lo >= hi) continue;
      const double eta = 2.0 * k[i][j] - k[i][i] - k[j][j];
      if (eta >= 0) continue;

      double aj = aj_old - y[j] * (ei - ej) / eta;
      aj = std::clamp(aj, lo, hi);
      if (std::fabs(aj - aj_old) < 1e-9) continue;
      const double ai = ai_old + y[i] * y[j] * (aj_old - aj);
      p.alpha[i] = ai;
      p.alpha[j] = aj;

      const double b1 = p.b - ei - y[i] * (ai - ai_old) * k[i][i] -
                        y[j] * (aj - aj_old) * k[i][j];
      const double b2 = p.b - ej - y[i] * (ai - ai_old) * k[i][j] -
                        y[j] * (aj - aj_old) * k[j][j];
      if (ai > 0 && ai < C) {
        p.b = b1;
      } else if (aj > 0 && aj < C) {
        p.b = b2;
      } else {
        p.b = (b1 + b2) / 2.0;
      }
      ++changed;
    }
    calm_passes = changed == 0 ? calm_passes + 1 : 0;
  }
  return p;
}

// Coordinate descent on pairs for the epsilon-insensitive dual, working on
// beta = alpha - alpha*. The 1-D move along (e_i, -e_j) is piecewise
// quadratic; the exact maximizer over the kink and box candidates is taken.
SvrParams svr_smo_train(const Matrix& x, const std::vector<double>& y,
                        const ModelConfig& cfg) {
  const std::size_t n = x.size();
  if (n < 2) throw DataError("svr: need at least 2 samples");
  if (cfg.c <= 0 || cfg.epsilon < 0) throw DataError("svr: bad C or epsilon");

  SvrParams p;
  p.x = x;
  p.beta.assign(n, 0.0);
  p.kscale = flat_variance_scale(x);
  const Matrix k = kernel_matrix(x, p.kscale, cfg.coef0, cfg.degree);
  const double C = cfg.c, eps = cfg.epsilon;

  std::vector<double> f(n, 0.0);  // sum_j beta_j K_ij, bias excluded

  auto delta_obj = [&](std::size_t i, std::size_t j, double d) {
    const double kappa = k[i][i] + k[j][j] - 2.0 * k[i][j];
    return d * (y[i] - y[j] - (f[i] - f[j])) - 0.5 * kappa * d * d -
           eps * (std::fabs(p.beta[i] + d) - std::fabs(p.beta[i]) +
                  std::fabs(p.beta[j] - d) - std::fabs(p.beta[j]));
  };

  const int max_sweeps = 200;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double lo = std::max(-C - p.beta[i], p.beta[j] - C);
        const double hi = std::min(C - p.beta[i], p.beta[j] + C);
        if (lo >= hi) continue;
        const double kappa = k[i][i] + k[j][j] - 2.0 * k[i][j];
        const double base = y[i] - y[j] - (f[i] - f[j]);

        double best_d = 0, best_gain = 1e-12;
        auto consider = [&](double d) {
          d = std::clamp(d, lo, hi);
          const double gain = delta_obj(i, j, d);
          if (gain > best_gain) {
            best_gain = gain;
            best_d = d;
          }
        };
        if (kappa > 1e-12) {
          // optimum of each sign combination of (beta_i + d, beta_j - d)
          for (double si : {-1.0, 1.0}) {
            for (double sj : {-1.0, 1.0}) {
              consider((base - eps * (si - sj)) / kappa);
            }
          }
        }
        consider(-p.beta[i]);
        consider(p.beta[j]);
        consider(lo);
        consider(hi);

        if (best_gain > 1e-12 && best_d != 0.0) {
          p.beta[i] += best_d;
          p.beta[j] -= best_d;
          for (std::size_t a = 0; a < n; ++a) {
            f[a] += best_d * (k[i][a] - k[j][a]);
          }
          moved = true;
        }
      }
    }
    if (!moved) break;
  }

  // bias from margin vectors; with no interior beta fall back to centering
  // the residuals (beta == 0 then gives b = mean(y))
  double acc = 0;
  int cnt = 0;
  const double edge = 1e-8 * C;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(p.beta[i]) > edge && std::fabs(p.beta[i]) < C - edge) {
      acc += y[i] - f[i] - eps * (p.beta[i] > 0 ? 1.0 : -1.0);
      ++cnt;
    }
  }
  if (cnt > 0) {
    p.b = acc / cnt;
  } else {
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) r += y[i] - f[i];
    p.b = r / static_cast<double>(n);
  }
  return p;
}

}  // namespace adspeech
