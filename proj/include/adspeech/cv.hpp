#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adspeech/extract.hpp"
#include "adspeech/models.hpp"
#include "adspeech/stats.hpp"

namespace adspeech {

/// Model-ready view of a feature table: one named feature subset.
struct Dataset {
  std::vector<std::string> ids;
  std::vector<std::string> feature_names;
  Matrix x;
  std::vector<std::string> labels;
  std::vector<std::optional<int>> mmse;
};

/// Selects a feature set's columns out of a table. `lexical_words` (the sel
/// set's mean word score) is derived on the fly when the table carries the
/// 50 raw scores instead.
Dataset select_set(const FeatureTable& table, FeatureSet set);

struct ClassMetrics {
  std::string label;
  double precision = 0, recall = 0, f1 = 0;
  long tp = 0, fp = 0, fn = 0;
};

struct Prediction {
  std::string session_id;
  std::string true_label, predicted_label;
  double true_value = 0, predicted_value = 0;
};

struct EvalReport {
  bool classification = true;
  double accuracy = 0;
  double rmse = 0;
  std::vector<ClassMetrics> per_class;
  std::vector<double> fold_scores;  // per-fold accuracy or rmse
  std::vector<Prediction> predictions;

  bool operator==(const EvalReport&) const = default;
};

/// Pooled classification metrics from prediction pairs.
void classification_metrics(EvalReport& report);
/// Pooled rmse from prediction pairs.
void regression_metrics(EvalReport& report);

/// Stratified fold assignment: one fold index per row. Classification
/// stratifies by label, regression by MMSE quartile; `stratify=false`
/// restores plain shuffled folds. Fold sizes differ by at most one.
std::vector<int> make_folds(const Dataset& data, bool regression, int folds,
                            std::uint64_t seed, bool stratify);

/// A trained per-fold predictor; the test hook for oracle models.
struct FoldPredictor {
  std::function<std::string(std::span<const double>)> label;
  std::function<double(std::span<const double>)> value;
};
using ModelFactory =
    std::function<FoldPredictor(const Dataset& train, std::uint64_t fold_seed)>;

EvalReport cross_validate_with(const Dataset& data, const ModelFactory& factory,
                               bool regression, int folds, std::uint64_t seed,
                               bool stratify, bool parallel);

/// Cross-validation of one model configuration; deterministic given seed,
/// identical across serial and parallel execution.
EvalReport cross_validate(const Dataset& data, const ModelConfig& config,
                          int folds, std::uint64_t seed, bool stratify = true,
                          bool parallel = true);

struct HoldoutResult {
  EvalReport report;
  TrainedModel model;
  std::vector<std::string> dropped_ids;  // outlier-filtered training rows
};

/// Fits on train (after optional outlier filtering) and scores test.
/// Session ids must be disjoint and feature names identical.
HoldoutResult evaluate_holdout(const Dataset& train, const Dataset& test,
                               const ModelConfig& config,
                               const std::optional<OutlierRule>& rule);

/// Aligned-text rendering of a report (per-class P/R/F1 plus accuracy, or
/// rmse, with the per-fold breakdown).
std::string render_report(const EvalReport& report);

}  // namespace adspeech
