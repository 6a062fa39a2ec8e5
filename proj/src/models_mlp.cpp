#include <cmath>

#include "adspeech/error.hpp"
#include "adspeech/mlp_net.hpp"

namespace adspeech {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

MlpNet::MlpNet(int inputs, int hidden, int outputs, bool linear, Rng& rng)
    : linear_output(linear) {
  auto init = [&rng] { return rng.uniform(-0.5, 0.5); };
  w1.assign(hidden, std::vector<double>(inputs));
  for (auto& row : w1) {
    for (double& v : row) v = init();
  }
  b1.resize(hidden);
  for (double& v : b1) v = init();
  w2.assign(outputs, std::vector<double>(hidden));
  for (auto& row : w2) {
    for (double& v : row) v = init();
  }
  b2.resize(outputs);
  for (double& v : b2) v = init();
}

std::vector<double> MlpNet::forward(std::span<const double> x) const {
  std::vector<double> h(w1.size());
  for (std::size_t i = 0; i < w1.size(); ++i) {
    double acc = b1[i];
    for (std::size_t j = 0; j < x.size(); ++j) acc += w1[i][j] * x[j];
    h[i] = sigmoid(acc);
  }
  std::vector<double> o(w2.size());
  for (std::size_t i = 0; i < w2.size(); ++i) {
    double acc = b2[i];
    for (std::size_t j = 0; j < h.size(); ++j) acc += w2[i][j] * h[j];
    o[i] = linear_output ? acc : sigmoid(acc);
  }
  return o;
}

double MlpNet::loss(const Matrix& x, const Matrix& targets) const {
  double acc = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const std::vector<double> o = forward(x[r]);
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double d = o[i] - targets[r][i];
      acc += d * d;
    }
  }
  return acc / (2.0 * static_cast<double>(x.size()));
}

MlpNet::Gradients MlpNet::gradients(const Matrix& x, const Matrix& targets) const {
  Gradients g;
  g.w1.assign(w1.size(), std::vector<double>(w1[0].size(), 0.0));
  g.b1.assign(b1.size(), 0.0);
  g.w2.assign(w2.size(), std::vector<double>(w2[0].size(), 0.0));
  g.b2.assign(b2.size(), 0.0);

  const double inv_n = 1.0 / static_cast<double>(x.size());
  std::vector<double> h(w1.size()), o(w2.size());
  for (std::size_t r = 0; r < x.size(); ++r) {
    const std::vector<double>& in = x[r];
    for (std::size_t i = 0; i < w1.size(); ++i) {
      double acc = b1[i];
      for (std::size_t j = 0; j < in.size(); ++j) acc += w1[i][j] * in[j];
      h[i] = sigmoid(acc);
    }
    for (std::size_t i = 0; i < w2.size(); ++i) {
      double acc = b2[i];
      for (std::size_t j = 0; j < h.size(); ++j) acc += w2[i][j] * h[j];
      o[i] = linear_output ? acc : sigmoid(acc);
    }

    std::vector<double> delta_o(o.size());
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double err = (o[i] - targets[r][i]) * inv_n;
      delta_o[i] = linear_output ? err : err * o[i] * (1.0 - o[i]);
    }
    std::vector<double> delta_h(h.size(), 0.0);
    for (std::size_t i = 0; i < o.size(); ++i) {
      for (std::size_t j = 0; j < h.size(); ++j) {
        delta_h[j] += delta_o[i] * w2[i][j];
      }
    }
    for (std::size_t j = 0; j < h.size(); ++j) delta_h[j] *= h[j] * (1.0 - h[j]);

    for (std::size_t i = 0; i < o.size(); ++i) {
      for (std::size_t j = 0; j < h.size(); ++j) g.w2[i][j] += delta_o[i] * h[j];
      g.b2[i] += delta_o[i];
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
      for (std::size_t j = 0; j < in.size(); ++j) g.w1[i][j] += delta_h[i] * in[j];
      g.b1[i] += delta_h[i];
    }
  }
  return g;
}

void MlpNet::flatten(std::vector<double*>& out) {
  out.clear();
  for (auto& row : w1) {
    for (double& v : row) out.push_back(&v);
  }
  for (double& v : b1) out.push_back(&v);
  for (auto& row : w2) {
    for (double& v : row) out.push_back(&v);
  }
  for (double& v : b2) out.push_back(&v);
}

// Full-batch gradient descent with momentum; regression targets are
// z-scored so the fixed 0.1 learning rate behaves across target units.
MlpParams mlp_train(const Matrix& x, const Matrix& targets, bool regression,
                    const ModelConfig& cfg) {
  if (x.size() < 2) throw DataError("mlp: need at least 2 samples");
  if (cfg.hidden < 1 || cfg.epochs < 0 || cfg.lr <= 0) {
    throw DataError("mlp: bad hyperparameters");
  }

  Matrix work_targets = targets;
  double y_mean = 0, y_sd = 1;
  if (regression) {
    double acc = 0;
    for (const auto& t : targets) acc += t[0];
    y_mean = acc / static_cast<double>(targets.size());
    double ss = 0;
    for (const auto& t : targets) ss += (t[0] - y_mean) * (t[0] - y_mean);
    y_sd = std::sqrt(ss / std::max<double>(1.0, static_cast<double>(targets.size()) - 1.0));
    if (y_sd <= 0) y_sd = 1.0;
    for (auto& t : work_targets) t[0] = (t[0] - y_mean) / y_sd;
  }

  Rng rng(cfg.seed);
  MlpNet net(static_cast<int>(x[0].size()), cfg.hidden,
             static_cast<int>(targets[0].size()), regression, rng);

  MlpNet::Gradients vel;
  vel.w1.assign(net.w1.size(), std::vector<double>(net.w1[0].size(), 0.0));
  vel.b1.assign(net.b1.size(), 0.0);
  vel.w2.assign(net.w2.size(), std::vector<double>(net.w2[0].size(), 0.0));
  vel.b2.assign(net.b2.size(), 0.0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const MlpNet::Gradients g = net.gradients(x, work_targets);
    for (std::size_t i = 0; i < net.w1.size(); ++i) {
      for (std::size_t j = 0; j < net.w1[0].size(); ++j) {
        vel.w1[i][j] = cfg.momentum * vel.w1[i][j] - cfg.lr * g.w1[i][j];
        net.w1[i][j] += vel.w1[i][j];
      }
      vel.b1[i] = cfg.momentum * vel.b1[i] - cfg.lr * g.b1[i];
      net.b1[i] += vel.b1[i];
    }
    for (std::size_t i = 0; i < net.w2.size(); ++i) {
      for (std::size_t j = 0; j < net.w2[0].size(); ++j) {
        vel.w2[i][j] = cfg.momentum * vel.w2[i][j] - cfg.lr * g.w2[i][j];
        net.w2[i][j] += vel.w2[i][j];
      }
      vel.b2[i] = cfg.momentum * vel.b2[i] - cfg.lr * g.b2[i];
      net.b2[i] += vel.b2[i];
    }
  }

  MlpParams p;
  p.w1 = std::move(net.w1);
  p.b1 = std::move(net.b1);
  p.w2 = std::move(net.w2);
  p.b2 = std::move(net.b2);
  p.y_mean = y_mean;
  p.y_sd = y_sd;
  return p;
}

LinRegParams linreg_sgd_train(const Matrix& x, const std::vector<double>& y,
                              const ModelConfig& cfg) {
  if (x.size() < 2) throw DataError("linreg: need at least 2 samples");
  const std::size_t n = x.size(), d = x[0].size();

  double y_mean = 0;
  for (double v : y) y_mean += v;
  y_mean /= static_cast<double>(n);
  double ss = 0;
  for (double v : y) ss += (v - y_mean) * (v - y_mean);
  double y_sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));
  if (y_sd <= 0) y_sd = 1.0;

  LinRegParams p;
  p.w.assign(d, 0.0);
  p.b = 0.0;
  p.y_mean = y_mean;
  p.y_sd = y_sd;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  long t = 0;
  for (int epoch = 0; epoch < cfg.sgd_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const double eta = cfg.lr0 / (1.0 + cfg.l2 * static_cast<double>(t));
      ++t;
      const std::vector<double>& row = x[idx];
      double pred = p.b;
      for (std::size_t j = 0; j < d; ++j) pred += p.w[j] * row[j];
      const double err = pred - (y[idx] - y_mean) / y_sd;
      for (std::size_t j = 0; j < d; ++j) {
        p.w[j] -= eta * (err * row[j] + cfg.l2 * p.w[j]);
      }
      p.b -= eta * err;
    }
  }
  return p;
}

}  // namespace adspeech
