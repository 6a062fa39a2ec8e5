#include <algorithm>
#include <cmath>
#include <map>

#include "adspeech/error.hpp"
#include "adspeech/mlp_net.hpp"
#include "adspeech/models.hpp"

namespace adspeech {

bool is_regression(ModelKind kind) {
  switch (kind) {
    case ModelKind::rf_reg:
    case ModelKind::svr_smo:
    case ModelKind::mlp_reg:
    case ModelKind::linreg_sgd:
      return true;
    default:
      return false;
  }
}

bool uses_standardization(ModelKind kind) {
  return kind != ModelKind::rf_class && kind != ModelKind::rf_reg;
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::rf_class: return "rf_class";
    case ModelKind::rf_reg: return "rf_reg";
    case ModelKind::knn: return "knn";
    case ModelKind::svm_smo: return "svm_smo";
    case ModelKind::svr_smo: return "svr_smo";
    case ModelKind::mlp_class: return "mlp_class";
    case ModelKind::mlp_reg: return "mlp_reg";
    case ModelKind::linreg_sgd: return "linreg_sgd";
  }
  throw InternalError("unreachable model kind");
}

ModelKind model_kind_from_string(const std::string& name, bool regression) {
  if (name == "rf") return regression ? ModelKind::rf_reg : ModelKind::rf_class;
  if (name == "knn" && !regression) return ModelKind::knn;
  if (name == "svm" && !regression) return ModelKind::svm_smo;
  if (name == "svr" && regression) return ModelKind::svr_smo;
  if (name == "mlp") return regression ? ModelKind::mlp_reg : ModelKind::mlp_class;
  if (name == "linreg" && regression) return ModelKind::linreg_sgd;
  // accept the explicit internal names too
  for (ModelKind k : {ModelKind::rf_class, ModelKind::rf_reg, ModelKind::knn,
                      ModelKind::svm_smo, ModelKind::svr_smo, ModelKind::mlp_class,
                      ModelKind::mlp_reg, ModelKind::linreg_sgd}) {
    if (model_kind_name(k) == name && is_regression(k) == regression) return k;
  }
  throw UsageError("unknown model '" + name + "' for this task");
}

void Standardizer::fit(const Matrix& x) {
  if (x.size() < 2) throw DataError("standardize: need at least 2 training rows");
  const std::size_t d = x[0].size();
  const double n = static_cast<double>(x.size());
  mean.assign(d, 0.0);
  sd.assign(d, 0.0);
  for (const auto& row : x) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) mean[j] /= n;
  for (const auto& row : x) {
    for (std::size_t j = 0; j < d; ++j) {
      sd[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) sd[j] = std::sqrt(sd[j] / (n - 1.0));
  enabled = true;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (!enabled) return {row.begin(), row.end()};
  if (row.size() != mean.size()) throw DataError("standardize: dimension mismatch");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = sd[j] > 0 ? (row[j] - mean[j]) / sd[j] : row[j];
  }
  return out;
}

Matrix Standardizer::apply_all(const Matrix& x) const {
  Matrix out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(apply(row));
  return out;
}

double poly_kernel(std::span<const double> u, std::span<const double> v,
                   double scale, double coef0, int degree) {
  if (u.size() != v.size()) throw DataError("kernel: dimension mismatch");
  double dot = 0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  double base = scale * dot + coef0;
  double out = 1;
  for (int i = 0; i < degree; ++i) out *= base;
  return out;
}

namespace {

std::vector<std::string> sorted_classes(const std::vector<std::string>& labels) {
  std::vector<std::string> classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

// Kernel scale pinned as 1 / (d * var) with var the population variance of
// the flattened standardized training matrix.
double kernel_scale(const Matrix& x) {
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

TrainedModel train_model(const ModelConfig& config, const Matrix& x,
                         const std::vector<std::string>& labels,
                         const std::vector<double>& targets,
                         const std::vector<std::string>& feature_names) {
  if (x.empty()) throw DataError("train_model: empty training set");
  const bool regression = is_regression(config.kind);
  if (!regression && labels.size() != x.size()) {
    throw DataError("train_model: label count does not match rows");
  }
  if (regression && targets.size() != x.size()) {
    throw DataError("train_model: target count does not match rows");
  }

  TrainedModel model;
  model.config = config;
  model.feature_names = feature_names;

  Matrix work = x;
  if (uses_standardization(config.kind)) {
    model.standardizer.fit(x);
    work = model.standardizer.apply_all(x);
  }

  std::vector<double> y;
  if (regression) {
    y = targets;
  } else {
    model.classes = sorted_classes(labels);
    if (model.classes.size() < 2) {
      throw DataError("train_model: classification needs at least 2 classes");
    }
    y.reserve(labels.size());
    for (const std::string& l : labels) {
      const auto it = std::find(model.classes.begin(), model.classes.end(), l);
      y.push_back(static_cast<double>(it - model.classes.begin()));
    }
  }

  switch (config.kind) {
    case ModelKind::rf_class:
      model.params = rf_train(work, y, false,
                              static_cast<int>(model.classes.size()), config);
      break;
    case ModelKind::rf_reg:
      model.params = rf_train(work, y, true, 0, config);
      break;
    case ModelKind::knn: {
      if (config.k < 1 || static_cast<std::size_t>(config.k) > work.size()) {
        throw DataError("knn: k must be in [1, train size]");
      }
      KnnParams p;
      p.x = work;
      p.y.reserve(y.size());
      for (double v : y) p.y.push_back(static_cast<int>(v));
      model.params = std::move(p);
      break;
    }
    case ModelKind::svm_smo: {
      if (model.classes.size() != 2) {
        throw DataError("svm: exactly two classes required");
      }
      std::vector<double> pm;  // class 0 (lexicographically first) -> -1
      pm.reserve(y.size());
      for (double v : y) pm.push_back(v == 0.0 ? -1.0 : 1.0);
      SvmParams p = svm_smo_train(work, pm, config);
      p.kscale = kernel_scale(work);  // recorded; trainer used the same value
      model.params = std::move(p);
      break;
    }
    case ModelKind::svr_smo:
      model.params = svr_smo_train(work, y, config);
      break;
    case ModelKind::mlp_class: {
      Matrix one_hot(work.size(), std::vector<double>(model.classes.size(), 0.0));
      for (std::size_t i = 0; i < work.size(); ++i) {
        one_hot[i][static_cast<std::size_t>(y[i])] = 1.0;
      }
      model.params = mlp_train(work, one_hot, false, config);
      break;
    }
    case ModelKind::mlp_reg: {
      Matrix t(work.size(), std::vector<double>(1));
      for (std::size_t i = 0; i < work.size(); ++i) t[i][0] = y[i];
      model.params = mlp_train(work, t, true, config);
      break;
    }
    case ModelKind::linreg_sgd:
      model.params = linreg_sgd_train(work, y, config);
      break;
  }
  return model;
}

double Tree::predict(std::span<const double> row) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& n = nodes[node];
    node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[node].value;
}

namespace {

int forest_vote(const RfParams& rf, std::span<const double> row, int n_classes) {
  std::vector<int> votes(n_classes, 0);
  for (const Tree& t : rf.trees) {
    votes[static_cast<int>(t.predict(row))] += 1;
  }
  int best = 0;
  for (int c = 1; c < n_classes; ++c) {
    if (votes[c] > votes[best]) best = c;  // ties keep the smaller index
  }
  return best;
}

int knn_vote(const KnnParams& p, std::span<const double> row, int k, int n_classes) {
  const std::size_t n = p.x.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double d = p.x[i][j] - row[j];
      acc += d * d;
    }
    dist[i] = {std::sqrt(acc), i};
  }
  // exact matches win outright
  std::vector<int> exact(n_classes, 0);
  bool any_exact = false;
  for (const auto& [d, i] : dist) {
    if (d == 0.0) {
      exact[p.y[i]] += 1;
      any_exact = true;
    }
  }
  if (any_exact) {
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (exact[c] > exact[best]) best = c;
    }
    return best;
  }
  std::sort(dist.begin(), dist.end());  // distance, then index: deterministic
  std::vector<double> weight(n_classes, 0.0);
  for (int i = 0; i < k; ++i) {
    weight[p.y[dist[static_cast<std::size_t>(i)].second]] +=
        1.0 / dist[static_cast<std::size_t>(i)].first;
  }
  int best = 0;
  for (int c = 1; c < n_classes; ++c) {
    if (weight[c] > weight[best]) best = c;
  }
  return best;
}

}  // namespace

std::string predict_label(const TrainedModel& model, std::span<const double> row) {
  if (is_regression(model.config.kind)) {
    throw InternalError("predict_label called on a regression model");
  }
  const std::vector<double> z = model.standardizer.enabled
                                    ? model.standardizer.apply(row)
                                    : std::vector<double>(row.begin(), row.end());
  const int n_classes = static_cast<int>(model.classes.size());
  int cls = 0;
  if (const auto* rf = std::get_if<RfParams>(&model.params)) {
    cls = forest_vote(*rf, z, n_classes);
  } else if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    cls = knn_vote(*knn, z, model.config.k, n_classes);
  } else if (const auto* svm = std::get_if<SvmParams>(&model.params)) {
    double f = svm->b;
    for (std::size_t i = 0; i < svm->x.size(); ++i) {
      if (svm->alpha[i] != 0.0) {
        f += svm->alpha[i] * svm->y[i] *
             poly_kernel(svm->x[i], z, svm->kscale, model.config.coef0,
                         model.config.degree);
      }
    }
    cls = f > 0 ? 1 : 0;
  } else if (const auto* mlp = std::get_if<MlpParams>(&model.params)) {
    MlpNet net;
    net.w1 = mlp->w1;
    net.b1 = mlp->b1;
    net.w2 = mlp->w2;
    net.b2 = mlp->b2;
    net.linear_output = false;
    const std::vector<double> out = net.forward(z);
    for (std::size_t c = 1; c < out.size(); ++c) {
      if (out[c] > out[static_cast<std::size_t>(cls)]) cls = static_cast<int>(c);
    }
  } else {
    throw InternalError("predict_label: unsupported parameter variant");
  }
  return model.classes[static_cast<std::size_t>(cls)];
}

double predict_value(const TrainedModel& model, std::span<const double> row) {
  if (!is_regression(model.config.kind)) {
    throw InternalError("predict_value called on a classification model");
  }
  const std::vector<double> z = model.standardizer.enabled
                                    ? model.standardizer.apply(row)
                                    : std::vector<double>(row.begin(), row.end());
  if (const auto* rf = std::get_if<RfParams>(&model.params)) {
    double acc = 0;
    for (const Tree& t : rf->trees) acc += t.predict(z);
    return acc / static_cast<double>(rf->trees.size());
  }
  if (const auto* svr = std::get_if<SvrParams>(&model.params)) {
    double f = svr->b;
    for (std::size_t i = 0; i < svr->x.size(); ++i) {
      if (svr->beta[i] != 0.0) {
        f += svr->beta[i] * poly_kernel(svr->x[i], z, svr->kscale,
                                        model.config.coef0, model.config.degree);
      }
    }
    return f;
  }
  if (const auto* mlp = std::get_if<MlpParams>(&model.params)) {
    MlpNet net;
    net.w1 = mlp->w1;
    net.b1 = mlp->b1;
    net.w2 = mlp->w2;
    net.b2 = mlp->b2;
    net.linear_output = true;
    return net.forward(z)[0] * mlp->y_sd + mlp->y_mean;
  }
  if (const auto* lin = std::get_if<LinRegParams>(&model.params)) {
    double f = lin->b;
    for (std::size_t j = 0; j < z.size(); ++j) f += lin->w[j] * z[j];
    return f * lin->y_sd + lin->y_mean;
  }
  throw InternalError("predict_value: unsupported parameter variant");
}

}  // namespace adspeech
