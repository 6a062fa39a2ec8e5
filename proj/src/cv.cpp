#include "adspeech/cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "adspeech/error.hpp"
#include "adspeech/parallel.hpp"
#include "adspeech/rng.hpp"

namespace adspeech {

Dataset select_set(const FeatureTable& table, FeatureSet set) {
  const std::vector<std::string> wanted = feature_names(set);
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < table.names.size(); ++j) index[table.names[j]] = j;

  // lexical_words can be derived from the 50 raw scores
  std::vector<std::size_t> lex_cols;
  const bool derive_lexical_words =
      index.find("lexical_words") == index.end() && index.count("lex01") > 0;
  if (derive_lexical_words) {
    for (int i = 1; i <= 50; ++i) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "lex%02d", i);
      auto it = index.find(buf);
      if (it == index.end()) throw DataError("feature table: missing column " + std::string(buf));
      lex_cols.push_back(it->second);
    }
  }

  Dataset ds;
  ds.feature_names = wanted;
  for (const FeatureRow& row : table.rows) {
    ds.ids.push_back(row.session_id);
    ds.labels.push_back(row.label);
    ds.mmse.push_back(row.mmse);
    std::vector<double> values;
    values.reserve(wanted.size());
    for (const std::string& name : wanted) {
      auto it = index.find(name);
      if (it != index.end()) {
        values.push_back(row.values[it->second]);
      } else if (name == "lexical_words" && derive_lexical_words) {
        double acc = 0;
        for (std::size_t c : lex_cols) acc += row.values[c];
        values.push_back(acc / 50.0);
      } else {
        throw DataError("feature table: missing column " + name);
      }
    }
    ds.x.push_back(std::move(values));
  }
  return ds;
}

void classification_metrics(EvalReport& report) {
  std::set<std::string> label_set;
  for (const Prediction& p : report.predictions) {
    label_set.insert(p.true_label);
    label_set.insert(p.predicted_label);
  }
  report.per_class.clear();
  long correct = 0;
  for (const std::string& cls : label_set) {
    ClassMetrics m;
    m.label = cls;
    for (const Prediction& p : report.predictions) {
      const bool truth = p.true_label == cls;
      const bool pred = p.predicted_label == cls;
      if (truth && pred) ++m.tp;
      if (!truth && pred) ++m.fp;
      if (truth && !pred) ++m.fn;
    }
    m.precision = m.tp + m.fp > 0 ? double(m.tp) / double(m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn > 0 ? double(m.tp) / double(m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.per_class.push_back(m);
  }
  for (const Prediction& p : report.predictions) {
    if (p.true_label == p.predicted_label) ++correct;
  }
  report.accuracy = report.predictions.empty()
                        ? 0.0
                        : double(correct) / double(report.predictions.size());
}

void regression_metrics(EvalReport& report) {
  double acc = 0;
  for (const Prediction& p : report.predictions) {
    const double d = p.predicted_value - p.true_value;
    acc += d * d;
  }
  report.rmse = report.predictions.empty()
                    ? 0.0
                    : std::sqrt(acc / double(report.predictions.size()));
}

std::vector<int> make_folds(const Dataset& data, bool regression, int folds,
                            std::uint64_t seed, bool stratify) {
  const std::size_t n = data.x.size();
  if (folds < 2) throw DataError("cross_validate: folds must be >= 2");

  // stratum key per row
  std::vector<std::string> key(n, "all");
  if (stratify) {
    if (regression) {
      std::vector<double> values;
      for (std::size_t i = 0; i < n; ++i) {
        if (!data.mmse[i]) throw DataError("regression requires mmse for every row");
        values.push_back(double(*data.mmse[i]));
      }
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      auto quantile = [&](double q) {
        return sorted[std::min(n - 1, std::size_t(q * double(n)))];
      };
      const double q1 = quantile(0.25), q2 = quantile(0.5), q3 = quantile(0.75);
      for (std::size_t i = 0; i < n; ++i) {
        key[i] = values[i] <= q1   ? "q1"
                 : values[i] <= q2 ? "q2"
                 : values[i] <= q3 ? "q3"
                                   : "q4";
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) key[i] = data.labels[i];
    }
  }

  // strata in sorted key order, shuffled within, dealt round-robin with a
  // running fold cursor so overall fold sizes differ by at most one
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) strata[key[i]].push_back(i);

  std::vector<int> fold_of(n, -1);
  std::size_t cursor = 0;
  std::uint64_t stratum_idx = 0;
  for (auto& [k, rows] : strata) {
    if (!regression && stratify &&
        rows.size() < static_cast<std::size_t>(folds)) {
      throw DataError("cross_validate: stratum '" + k +
                      "' has fewer rows than folds");
    }
    Rng rng = Rng::derive(seed, stratum_idx++);
    rng.shuffle(rows);
    for (std::size_t r : rows) {
      fold_of[r] = static_cast<int>(cursor % static_cast<std::size_t>(folds));
      ++cursor;
    }
  }
  return fold_of;
}

EvalReport cross_validate_with(const Dataset& data, const ModelFactory& factory,
                               bool regression, int folds, std::uint64_t seed,
                               bool stratify, bool parallel) {
  const std::size_t n = data.x.size();
  if (n < static_cast<std::size_t>(folds)) {
    throw DataError("cross_validate: fewer rows than folds");
  }
  const std::vector<int> fold_of = make_folds(data, regression, folds, seed, stratify);

  std::vector<std::vector<Prediction>> fold_preds(static_cast<std::size_t>(folds));
  std::vector<std::string> fold_errors(static_cast<std::size_t>(folds));

  for_index(static_cast<std::size_t>(folds), parallel, [&](std::size_t f) {
    try {
      Dataset train, test;
      train.feature_names = test.feature_names = data.feature_names;
      for (std::size_t i = 0; i < n; ++i) {
        Dataset& dst = fold_of[i] == static_cast<int>(f) ? test : train;
        dst.ids.push_back(data.ids[i]);
        dst.labels.push_back(data.labels[i]);
        dst.mmse.push_back(data.mmse[i]);
        dst.x.push_back(data.x[i]);
      }
      const FoldPredictor model = factory(train, Rng::derive(seed, 1000 + f).next_u64());
      for (std::size_t i = 0; i < test.x.size(); ++i) {
        Prediction p;
        p.session_id = test.ids[i];
        if (regression) {
          p.true_value = double(*test.mmse[i]);
          p.predicted_value = model.value(test.x[i]);
        } else {
          p.true_label = test.labels[i];
          p.predicted_label = model.label(test.x[i]);
        }
        fold_preds[f].push_back(std::move(p));
      }
    } catch (const std::exception& e) {
      fold_errors[f] = e.what();
    }
  });
  for (const std::string& err : fold_errors) {
    if (!err.empty()) throw DataError("cross_validate fold failed: " + err);
  }

  EvalReport report;
  report.classification = !regression;
  for (std::size_t f = 0; f < fold_preds.size(); ++f) {
    double fold_metric = 0;
    if (regression) {
      for (const Prediction& p : fold_preds[f]) {
        const double d = p.predicted_value - p.true_value;
        fold_metric += d * d;
      }
      fold_metric = fold_preds[f].empty()
                        ? 0.0
                        : std::sqrt(fold_metric / double(fold_preds[f].size()));
    } else {
      long ok = 0;
      for (const Prediction& p : fold_preds[f]) {
        if (p.true_label == p.predicted_label) ++ok;
      }
      fold_metric = fold_preds[f].empty() ? 0.0 : double(ok) / double(fold_preds[f].size());
    }
    report.fold_scores.push_back(fold_metric);
    report.predictions.insert(report.predictions.end(), fold_preds[f].begin(),
                              fold_preds[f].end());
  }
  if (regression) {
    regression_metrics(report);
  } else {
    classification_metrics(report);
  }
  return report;
}

namespace {

ModelFactory factory_for(const ModelConfig& config) {
  return [config](const Dataset& train, std::uint64_t fold_seed) {
    ModelConfig fold_cfg = config;
    fold_cfg.seed = fold_seed;
    std::vector<double> targets;
    if (is_regression(config.kind)) {
      for (const auto& m : train.mmse) {
        if (!m) throw DataError("regression requires mmse for every row");
        targets.push_back(double(*m));
      }
    }
    auto model = std::make_shared<TrainedModel>(train_model(
        fold_cfg, train.x, train.labels, targets, train.feature_names));
    FoldPredictor fp;
    fp.label = [model](std::span<const double> row) {
      return predict_label(*model, row);
    };
    fp.value = [model](std::span<const double> row) {
      return predict_value(*model, row);
    };
    return fp;
  };
}

}  // namespace

EvalReport cross_validate(const Dataset& data, const ModelConfig& config,
                          int folds, std::uint64_t seed, bool stratify,
                          bool parallel) {
  return cross_validate_with(data, factory_for(config), is_regression(config.kind),
                             folds, seed, stratify, parallel);
}

HoldoutResult evaluate_holdout(const Dataset& train, const Dataset& test,
                               const ModelConfig& config,
                               const std::optional<OutlierRule>& rule) {
  if (train.feature_names != test.feature_names) {
    throw DataError("holdout: feature names differ between train and test");
  }
  std::set<std::string> train_ids(train.ids.begin(), train.ids.end());
  for (const std::string& id : test.ids) {
    if (train_ids.count(id)) {
      throw DataError("holdout: session id " + id + " appears in both sets");
    }
  }

  HoldoutResult result;
  Dataset fit = train;
  if (rule) {
    // the rule reads the lexical mean; derive it from whichever columns the
    // set carries
    std::vector<StatRow> rows;
    auto lex_mean = [&](const std::vector<double>& values) {
      double acc = 0;
      int cnt = 0;
      for (std::size_t j = 0; j < train.feature_names.size(); ++j) {
        const std::string& name = train.feature_names[j];
        if (name == "lexical_words") return values[j];
        if (name.size() == 5 && name.compare(0, 3, "lex") == 0) {
          acc += values[j];
          ++cnt;
        }
      }
      if (cnt == 0) throw DataError("outlier rule needs lexical features in the set");
      return acc / double(cnt);
    };
    for (std::size_t i = 0; i < train.x.size(); ++i) {
      StatRow r;
      r.session_id = train.ids[i];
      r.label = train.labels[i];
      r.mmse = train.mmse[i];
      r.lexical_mean = lex_mean(train.x[i]);
      rows.push_back(r);
    }
    auto [kept, dropped] = filter_outliers(rows, *rule);
    std::set<std::string> drop_ids;
    for (const StatRow& r : dropped) {
      drop_ids.insert(r.session_id);
      result.dropped_ids.push_back(r.session_id);
    }
    Dataset filtered;
    filtered.feature_names = train.feature_names;
    for (std::size_t i = 0; i < train.x.size(); ++i) {
      if (drop_ids.count(train.ids[i])) continue;
      filtered.ids.push_back(train.ids[i]);
      filtered.labels.push_back(train.labels[i]);
      filtered.mmse.push_back(train.mmse[i]);
      filtered.x.push_back(train.x[i]);
    }
    fit = std::move(filtered);
  }

  const bool regression = is_regression(config.kind);
  std::vector<double> targets;
  if (regression) {
    for (const auto& m : fit.mmse) {
      if (!m) throw DataError("regression requires mmse for every row");
      targets.push_back(double(*m));
    }
  }
  result.model = train_model(config, fit.x, fit.labels, targets, fit.feature_names);

  result.report.classification = !regression;
  for (std::size_t i = 0; i < test.x.size(); ++i) {
    Prediction p;
    p.session_id = test.ids[i];
    if (regression) {
      p.true_value = test.mmse[i] ? double(*test.mmse[i]) : 0.0;
      p.predicted_value = predict_value(result.model, test.x[i]);
    } else {
      p.true_label = test.labels[i];
      p.predicted_label = predict_label(result.model, test.x[i]);
    }
    result.report.predictions.push_back(std::move(p));
  }
  if (regression) {
    regression_metrics(result.report);
  } else {
    classification_metrics(result.report);
  }
  return result;
}

std::string render_report(const EvalReport& report) {
  std::ostringstream out;
  char buf[160];
  if (report.classification) {
    out << "class     P       R       F1      Acc\n";
    for (std::size_t i = 0; i < report.per_class.size(); ++i) {
      const ClassMetrics& m = report.per_class[i];
      if (i == 0) {
        std::snprintf(buf, sizeof(buf), "%-8s  %.4f  %.4f  %.4f  %.4f\n",
                      m.label.c_str(), m.precision, m.recall, m.f1,
                      report.accuracy);
      } else {
        std::snprintf(buf, sizeof(buf), "%-8s  %.4f  %.4f  %.4f\n",
                      m.label.c_str(), m.precision, m.recall, m.f1);
      }
      out << buf;
    }
  } else {
    std::snprintf(buf, sizeof(buf), "rmse  %.4f\n", report.rmse);
    out << buf;
  }
  if (!report.fold_scores.empty()) {
    out << (report.classification ? "fold accuracy:" : "fold rmse:");
    for (double v : report.fold_scores) {
      std::snprintf(buf, sizeof(buf), " %.4f", v);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace adspeech
