#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace adspeech {

using Matrix = std::vector<std::vector<double>>;

enum class ModelKind {
  rf_class,
  rf_reg,
  knn,
  svm_smo,
  svr_smo,
  mlp_class,
  mlp_reg,
  linreg_sgd
};

bool is_regression(ModelKind kind);
bool uses_standardization(ModelKind kind);  // everything except random forest
std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name, bool regression);

/// Hyperparameters for all eight configurations. Defaults pin the values
/// the pipeline documents; every field is reachable from the config file.
struct ModelConfig {
  ModelKind kind = ModelKind::rf_class;
  std::uint64_t seed = 1;
  // random forest
  int trees = 100;
  int max_depth = 0;  // 0 = unlimited
  int min_split = 2;
  int mtry = 0;  // 0 = floor(log2 d) + 1
  bool bootstrap = true;
  bool rf_parallel = true;
  // knn
  int k = 5;
  // svm / svr (polynomial kernel (scale*<u,v> + coef0)^degree)
  double c = 1.0;
  int degree = 3;
  double coef0 = 0.0;
  double tol = 1e-3;  // KKT tolerance the checker asserts
  double epsilon = 0.1;
  int max_passes = 10;
  long max_iter = 2000000;
  // mlp
  int hidden = 2;
  double lr = 0.1;
  double momentum = 0.2;
  int epochs = 500;
  // linear regression with sgd
  double lr0 = 0.01;
  double l2 = 1e-4;
  int sgd_epochs = 1000;
};

/// Per-feature z-scoring constants fit on training rows only; features with
/// zero spread pass through untouched.
struct Standardizer {
  std::vector<double> mean, sd;
  bool enabled = false;

  void fit(const Matrix& x);
  std::vector<double> apply(std::span<const double> row) const;
  Matrix apply_all(const Matrix& x) const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1, right = -1;
  double value = 0;  // class index or regression mean
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> row) const;
};

struct RfParams {
  std::vector<Tree> trees;
};

struct KnnParams {
  Matrix x;
  std::vector<int> y;
};

struct SvmParams {
  Matrix x;  // full standardized training matrix (duals kept for checkers)
  std::vector<double> y;  // -1 / +1
  std::vector<double> alpha;
  double b = 0;
  double kscale = 1;
};

struct SvrParams {
  Matrix x;
  std::vector<double> beta;  // alpha_i - alpha_i*, complementary by form
  double b = 0;
  double kscale = 1;
};

struct MlpParams {
  Matrix w1;  // hidden x input
  std::vector<double> b1;
  Matrix w2;  // output x hidden
  std::vector<double> b2;
  double y_mean = 0, y_sd = 1;  // regression target scaling
};

struct LinRegParams {
  std::vector<double> w;
  double b = 0;
  double y_mean = 0, y_sd = 1;
};

struct TrainedModel {
  ModelConfig config;
  std::vector<std::string> feature_names;
  std::vector<std::string> classes;  // sorted label names (classification)
  Standardizer standardizer;
  std::variant<RfParams, KnnParams, SvmParams, SvrParams, MlpParams, LinRegParams>
      params;
};

/// Trains any configuration. Classification reads `labels`; regression
/// reads `targets`. Deterministic given config.seed.
TrainedModel train_model(const ModelConfig& config, const Matrix& x,
                         const std::vector<std::string>& labels,
                         const std::vector<double>& targets,
                         const std::vector<std::string>& feature_names);

std::string predict_label(const TrainedModel& model, std::span<const double> row);
double predict_value(const TrainedModel& model, std::span<const double> row);

/// Polynomial kernel shared by SVM/SVR and their test checkers.
double poly_kernel(std::span<const double> u, std::span<const double> v,
                   double scale, double coef0, int degree);

/// Versioned self-describing JSON model files.
void save_model(const TrainedModel& model, const std::string& path,
                const std::string& header_comment);
TrainedModel load_model(const std::string& path);

// per-kind trainers (exposed for the oracle tests)
RfParams rf_train(const Matrix& x, const std::vector<double>& y, bool regression,
                  int n_classes, const ModelConfig& cfg);
SvmParams svm_smo_train(const Matrix& x, const std::vector<double>& y,
                        const ModelConfig& cfg);
SvrParams svr_smo_train(const Matrix& x, const std::vector<double>& y,
                        const ModelConfig& cfg);
MlpParams mlp_train(const Matrix& x, const Matrix& targets, bool regression,
                    const ModelConfig& cfg);
LinRegParams linreg_sgd_train(const Matrix& x, const std::vector<double>& y,
                              const ModelConfig& cfg);

}  // namespace adspeech
