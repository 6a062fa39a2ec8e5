#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "adspeech/config.hpp"
#include "adspeech/corpus.hpp"
#include "adspeech/csv.hpp"
#include "adspeech/cv.hpp"
#include "adspeech/error.hpp"
#include "adspeech/extract.hpp"
#include "adspeech/stats.hpp"
#include "adspeech/version.hpp"

namespace fs = std::filesystem;
using namespace adspeech;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  bool serial = false;
  PipelineConfig config;

  std::string header() const {
    return std::string("adspeech ") + kVersion + " seed=" + std::to_string(seed) +
           " config=" + config.hash();
  }
};

void load_config(GlobalArgs& g) {
  if (g.config_path.empty()) {
    if (const char* env = std::getenv("ADSPEECH_CONFIG")) g.config_path = env;
  }
  if (!g.config_path.empty()) g.config.load_file(g.config_path);
  if (g.serial) g.config.set("run.parallel", "false");
}

OutlierRule parse_outlier_rule(const std::string& spec) {
  // e.g. "ad30:1,lexlow:3"
  OutlierRule rule;
  std::istringstream in(spec);
  std::string part;
  while (std::getline(in, part, ',')) {
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos) {
      throw UsageError("outlier rule must be key:value, got '" + part + "'");
    }
    const std::string key = part.substr(0, colon);
    int value = 0;
    try {
      value = std::stoi(part.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("outlier rule value is not an integer: '" + part + "'");
    }
    if (key == "ad30") {
      rule.drop_ad_mmse_at_ceiling = value != 0;
    } else if (key == "lexlow") {
      rule.drop_k_lowest_nonad_lexical = value;
    } else {
      throw UsageError("unknown outlier rule key: '" + key + "'");
    }
  }
  return rule;
}

std::vector<StatRow> stat_rows_from_table(const FeatureTable& table) {
  std::vector<std::size_t> lex_cols;
  std::ptrdiff_t lexical_words_col = -1;
  for (std::size_t j = 0; j < table.names.size(); ++j) {
    const std::string& n = table.names[j];
    if (n == "lexical_words") lexical_words_col = static_cast<std::ptrdiff_t>(j);
    if (n.size() == 5 && n.compare(0, 3, "lex") == 0) lex_cols.push_back(j);
  }
  std::vector<StatRow> rows;
  for (const FeatureRow& r : table.rows) {
    StatRow s;
    s.session_id = r.session_id;
    s.label = r.label;
    s.mmse = r.mmse;
    if (lexical_words_col >= 0) {
      s.lexical_mean = r.values[static_cast<std::size_t>(lexical_words_col)];
    } else if (!lex_cols.empty()) {
      double acc = 0;
      for (std::size_t c : lex_cols) acc += r.values[c];
      s.lexical_mean = acc / double(lex_cols.size());
    }
    rows.push_back(s);
  }
  return rows;
}

int cmd_synth(GlobalArgs& g, const std::string& out_dir, int n,
              const std::vector<std::string>& effects) {
  SynthCorpusOptions opts;
  opts.n_per_group = n;
  opts.effects = EffectPlan::parse(effects);
  opts.seed = g.seed;
  opts.sample_rate = g.config.get_int("synth.sample_rate");
  opts.header_comment = g.header();
  synth_corpus(out_dir, opts);
  std::cout << "wrote corpus: " << out_dir << "\n";
  std::cout << "manifest: " << out_dir << "/manifest.csv\n";
  return 0;
}

int cmd_extract(GlobalArgs& g, const std::string& corpus_dir, const std::string& out_csv,
                const std::string& set_tag, const std::string& fit_sidecar,
                const std::string& use_sidecar) {
  if (fit_sidecar.empty() == use_sidecar.empty()) {
    throw UsageError("extract needs exactly one of --fit or --sidecar");
  }
  const FeatureSet set = feature_set_from_string(set_tag);
  std::optional<Sidecar> sidecar;
  if (!use_sidecar.empty()) sidecar = load_sidecar(use_sidecar);

  ExtractResult result =
      extract_corpus(corpus_dir, set, g.config.dsp_bundle(), sidecar,
                     !fit_sidecar.empty(), g.config.get_bool("features.demographics"));
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (!fit_sidecar.empty()) save_sidecar(fit_sidecar, result.sidecar, g.header());
  write_feature_csv(out_csv, result.table, g.header());
  std::cout << "wrote " << result.table.rows.size() << " rows to " << out_csv << "\n";
  return 0;
}

int cmd_stats(GlobalArgs& g, const std::string& features_csv, const std::string& out_dir,
              double alpha, bool full, const std::string& outlier_spec) {
  const FeatureTable table = read_feature_csv(features_csv);
  fs::create_directories(out_dir);

  // lexical_words is derived for the report when only raw scores are present
  std::vector<std::string> names = table.names;
  std::vector<std::vector<double>> columns(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    for (const FeatureRow& r : table.rows) columns[j].push_back(r.values[j]);
  }
  const std::vector<StatRow> rows = stat_rows_from_table(table);
  {
    bool have_col = std::find(names.begin(), names.end(), "lexical_words") != names.end();
    bool have_lex = std::any_of(names.begin(), names.end(), [](const std::string& n) {
      return n.size() == 5 && n.compare(0, 3, "lex") == 0;
    });
    if (!have_col && have_lex) {
      names.push_back("lexical_words");
      std::vector<double> col;
      for (const StatRow& r : rows) col.push_back(r.lexical_mean);
      columns.push_back(std::move(col));
    }
  }

  const bool pooled = g.config.get_bool("stats.pooled_variance");
  std::ostringstream text;
  text << "# " << g.header() << "\n";
  text << "feature              nonAD       AD          p           r_mmse\n";
  CsvDoc csv;
  csv.comments.push_back("# " + g.header());
  csv.header = {"feature", "mean_nonAD", "mean_AD", "t", "df", "p", "r_mmse"};

  std::vector<double> mmse_col;
  std::vector<std::size_t> mmse_rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].mmse) {
      mmse_col.push_back(double(*table.rows[i].mmse));
      mmse_rows.push_back(i);
    }
  }

  int listed = 0;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == "age" || names[j] == "gender") continue;
    std::vector<double> ad, non;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      (table.rows[i].label == "AD" ? ad : non).push_back(columns[j][i]);
    }
    std::string p_text = "-", t_text = "-", df_text = "-", r_text = "-";
    bool significant = false;
    try {
      const TTestResult res = welch_t_test(non, ad, pooled);
      p_text = format_double(res.p);
      t_text = format_double(res.t);
      df_text = format_double(res.df);
      significant = res.p < alpha;
    } catch (const DataError&) {
      // degenerate feature: listed with p absent under --full
    }
    if (mmse_col.size() >= 3) {
      std::vector<double> x;
      for (std::size_t i : mmse_rows) x.push_back(columns[j][i]);
      try {
        r_text = format_double(pearson(x, mmse_col).r);
      } catch (const DataError&) {
      }
    }
    if (!full && !significant) continue;
    ++listed;
    double mean_non = 0, mean_ad = 0;
    for (double v : non) mean_non += v;
    for (double v : ad) mean_ad += v;
    if (!non.empty()) mean_non /= double(non.size());
    if (!ad.empty()) mean_ad /= double(ad.size());
    char line[200];
    std::snprintf(line, sizeof(line), "%-20s %-11.4g %-11.4g %-11s %-11s\n",
                  names[j].c_str(), mean_non, mean_ad, p_text.c_str(), r_text.c_str());
    text << line;
    csv.rows.push_back({names[j], format_double(mean_non), format_double(mean_ad),
                        t_text, df_text, p_text, r_text});
  }
  text << "(" << listed << " features listed, alpha=" << format_double(alpha) << ")\n";

  // Fig-1-style scatter with the outlier rule applied for marking
  std::vector<StatRow> kept = rows, dropped;
  if (!outlier_spec.empty()) {
    const OutlierRule rule = parse_outlier_rule(outlier_spec);
    auto parts = filter_outliers(rows, rule);
    kept = std::move(parts.first);
    dropped = std::move(parts.second);
    text << "outliers marked:";
    for (const StatRow& d : dropped) text << " " << d.session_id;
    text << "\n";
  }

  {
    std::ofstream out(out_dir + "/significance.txt");
    if (!out) throw DataError("cannot write " + out_dir + "/significance.txt");
    out << text.str();
  }
  write_csv(out_dir + "/significance.csv", csv);
  {
    std::ofstream out(out_dir + "/mmse_scatter.svg");
    if (!out) throw DataError("cannot write " + out_dir + "/mmse_scatter.svg");
    out << scatter_svg(kept, dropped, g.header());
  }
  std::cout << text.str();
  std::cout << "wrote " << out_dir << "/significance.{txt,csv} and mmse_scatter.svg\n";
  return 0;
}

struct GridNames {
  std::vector<std::string> cli;
  std::vector<ModelKind> kinds;
};

GridNames grid_models(bool regression) {
  if (regression) {
    return {{"rf", "linreg", "svr", "mlp"},
            {ModelKind::rf_reg, ModelKind::linreg_sgd, ModelKind::svr_smo,
             ModelKind::mlp_reg}};
  }
  return {{"rf", "knn", "svm", "mlp"},
          {ModelKind::rf_class, ModelKind::knn, ModelKind::svm_smo,
           ModelKind::mlp_class}};
}

int cmd_cv(GlobalArgs& g, const std::string& features_csv, const std::string& model,
           bool regression, const std::string& set_tag, int folds,
           const std::string& out_path, bool no_stratify) {
  const FeatureTable table = read_feature_csv(features_csv);
  const bool stratify = !no_stratify && g.config.get_bool("cv.stratify");
  const bool parallel = g.config.get_bool("run.parallel");

  std::ostringstream out;
  out << "# " << g.header() << "\n";
  if (model == "all") {
    const GridNames grid = grid_models(regression);
    const std::vector<std::string> sets = {"pros", "vq",  "pros+vq", "lex",
                                           "lex+pros", "sel", "all"};
    out << (regression ? "rmse by feature set and model\n"
                       : "accuracy by feature set and model\n");
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %10s %10s %10s %10s\n", "set",
                  grid.cli[0].c_str(), grid.cli[1].c_str(), grid.cli[2].c_str(),
                  grid.cli[3].c_str());
    out << line;
    for (const std::string& set_name : sets) {
      const Dataset ds = select_set(table, feature_set_from_string(set_name));
      std::snprintf(line, sizeof(line), "%-10s", set_name.c_str());
      out << line;
      for (ModelKind kind : grid.kinds) {
        const EvalReport rep =
            cross_validate(ds, g.config.model_config(kind, g.seed), folds, g.seed,
                           stratify, parallel);
        std::snprintf(line, sizeof(line), " %10.3f",
                      regression ? rep.rmse : rep.accuracy);
        out << line;
      }
      out << "\n";
    }
  } else {
    const Dataset ds = select_set(table, feature_set_from_string(set_tag));
    const ModelKind kind = model_kind_from_string(model, regression);
    const EvalReport rep = cross_validate(ds, g.config.model_config(kind, g.seed),
                                          folds, g.seed, stratify, parallel);
    out << "model=" << model << " set=" << set_tag << " folds=" << folds << "\n";
    out << render_report(rep);
  }
  std::cout << out.str();
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw DataError("cannot write report: " + out_path);
    f << out.str();
  }
  return 0;
}

int cmd_train(GlobalArgs& g, const std::string& train_csv, const std::string& model_name,
              bool regression, const std::string& set_tag, const std::string& out_model,
              const std::string& outlier_spec, const std::string& report_path) {
  const FeatureTable table = read_feature_csv(train_csv);
  const Dataset train = select_set(table, feature_set_from_string(set_tag));
  const ModelKind kind = model_kind_from_string(model_name, regression);
  std::optional<OutlierRule> rule;
  if (!outlier_spec.empty()) rule = parse_outlier_rule(outlier_spec);

  Dataset empty_test;
  empty_test.feature_names = train.feature_names;
  const HoldoutResult fit =
      evaluate_holdout(train, empty_test, g.config.model_config(kind, g.seed), rule);

  save_model(fit.model, out_model, g.header());

  std::ostringstream out;
  out << "# " << g.header() << "\n";
  out << "trained " << model_name << " (set " << set_tag << ") on "
      << train.ids.size() - fit.dropped_ids.size() << " rows\n";
  if (!fit.dropped_ids.empty()) {
    out << "dropped " << fit.dropped_ids.size() << " outliers:";
    for (const std::string& id : fit.dropped_ids) out << " " << id;
    out << "\n";
  }
  std::cout << out.str();
  std::cout << "wrote model: " << out_model << "\n";
  if (!report_path.empty()) {
    std::ofstream f(report_path);
    if (!f) throw DataError("cannot write report: " + report_path);
    f << out.str();
  }
  return 0;
}

int cmd_predict(GlobalArgs& g, const std::string& model_path, const std::string& test_csv,
                const std::string& out_csv, const std::string& report_path) {
  const TrainedModel model = load_model(model_path);
  const FeatureTable table = read_feature_csv(test_csv);

  FeatureSet set = FeatureSet::all;
  bool matched = false;
  for (FeatureSet s : {FeatureSet::pros, FeatureSet::vq, FeatureSet::pros_vq,
                       FeatureSet::lex, FeatureSet::lex_pros, FeatureSet::sel,
                       FeatureSet::all}) {
    if (feature_names(s) == model.feature_names) {
      set = s;
      matched = true;
    }
  }
  if (!matched) throw DataError("model feature names match no known feature set");
  const Dataset test = select_set(table, set);

  const bool regression = is_regression(model.config.kind);
  CsvDoc out;
  out.comments.push_back("# " + g.header());
  out.header = {"session_id", regression ? "predicted_mmse" : "predicted_label"};

  EvalReport report;
  report.classification = !regression;
  bool have_truth = true;
  for (std::size_t i = 0; i < test.x.size(); ++i) {
    Prediction p;
    p.session_id = test.ids[i];
    if (regression) {
      p.predicted_value = predict_value(model, test.x[i]);
      if (test.mmse[i]) {
        p.true_value = double(*test.mmse[i]);
      } else {
        have_truth = false;
      }
      out.rows.push_back({p.session_id, format_double(p.predicted_value)});
    } else {
      p.predicted_label = predict_label(model, test.x[i]);
      p.true_label = test.labels[i];
      if (p.true_label.empty()) have_truth = false;
      out.rows.push_back({p.session_id, p.predicted_label});
    }
    report.predictions.push_back(std::move(p));
  }
  write_csv(out_csv, out);
  std::cout << "wrote predictions: " << out_csv << "\n";

  if (have_truth && !report.predictions.empty()) {
    if (regression) {
      regression_metrics(report);
    } else {
      classification_metrics(report);
    }
    const std::string rendered = render_report(report);
    std::cout << rendered;
    if (!report_path.empty()) {
      std::ofstream f(report_path);
      if (!f) throw DataError("cannot write report: " + report_path);
      f << "# " << g.header() << "\n" << rendered;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speech + transcript screening pipeline"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "config file (or ADSPEECH_CONFIG)");
  app.add_option("--seed", g.seed, "random seed echoed into every artifact")
      ->capture_default_str();
  app.add_flag("--serial", g.serial, "disable OpenMP parallelism");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string synth_out;
  int synth_n = 10;
  std::vector<std::string> synth_effects;
  synth->add_option("--out", synth_out, "output corpus directory")->required();
  synth->add_option("--n", synth_n, "sessions per group")->capture_default_str();
  synth->add_option("--effect", synth_effects,
                    "planted AD-group shift key:value (pause, rate, lex, f0, inv, "
                    "artic, ad30)");

  auto* extract = app.add_subcommand("extract", "extract features from a corpus");
  std::string ex_corpus, ex_out, ex_set = "all", ex_fit, ex_sidecar;
  extract->add_option("--corpus", ex_corpus, "corpus directory")->required();
  extract->add_option("--out", ex_out, "output feature CSV")->required();
  extract->add_option("--set", ex_set, "feature set tag")->capture_default_str();
  extract->add_option("--fit", ex_fit, "fit vocabulary/normalization, write sidecar here");
  extract->add_option("--sidecar", ex_sidecar, "use a previously fitted sidecar");

  auto* stats = app.add_subcommand("stats", "group statistics and MMSE scatter");
  std::string st_features, st_out = "stats_out", st_outliers;
  double st_alpha = 0.05;
  bool st_full = false;
  stats->add_option("--features", st_features, "feature CSV")->required();
  stats->add_option("--out-dir", st_out, "output directory")->capture_default_str();
  stats->add_option("--alpha", st_alpha, "significance level")->capture_default_str();
  stats->add_flag("--full", st_full, "list all features, not only significant ones");
  stats->add_option("--drop-outliers", st_outliers, "outlier rule, e.g. ad30:1,lexlow:3");

  auto* cv = app.add_subcommand("cv", "cross-validated evaluation");
  std::string cv_features, cv_model = "rf", cv_task = "class", cv_set = "all", cv_out;
  int cv_folds = 10;
  bool cv_no_strat = false;
  cv->add_option("--features", cv_features, "feature CSV")->required();
  cv->add_option("--model", cv_model, "rf|knn|svm|mlp|linreg|svr or 'all'")
      ->capture_default_str();
  cv->add_option("--task", cv_task, "class|reg")->capture_default_str();
  cv->add_option("--set", cv_set, "feature set tag")->capture_default_str();
  cv->add_option("--folds", cv_folds, "fold count")->capture_default_str();
  cv->add_option("--out", cv_out, "write the report here too");
  cv->add_flag("--no-stratify", cv_no_strat, "plain folds instead of stratified");

  auto* train = app.add_subcommand("train", "fit a model and save it");
  std::string tr_csv, tr_model = "rf", tr_task = "class", tr_set = "all",
              tr_out = "model.json", tr_outliers, tr_report;
  train->add_option("--train", tr_csv, "training feature CSV")->required();
  train->add_option("--model", tr_model, "rf|knn|svm|mlp|linreg|svr")->capture_default_str();
  train->add_option("--task", tr_task, "class|reg")->capture_default_str();
  train->add_option("--set", tr_set, "feature set tag")->capture_default_str();
  train->add_option("--out", tr_out, "model file")->capture_default_str();
  train->add_option("--drop-outliers", tr_outliers, "outlier rule, e.g. ad30:1,lexlow:3");
  train->add_option("--report", tr_report, "write the fit report here");

  auto* predict = app.add_subcommand("predict", "apply a saved model");
  std::string pr_model, pr_test, pr_out = "predictions.csv", pr_report;
  predict->add_option("--model", pr_model, "model file")->required();
  predict->add_option("--test", pr_test, "test feature CSV")->required();
  predict->add_option("--out", pr_out, "predictions CSV")->capture_default_str();
  predict->add_option("--report", pr_report, "write the score report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    load_config(g);
    if (synth->parsed()) return cmd_synth(g, synth_out, synth_n, synth_effects);
    if (extract->parsed()) return cmd_extract(g, ex_corpus, ex_out, ex_set, ex_fit, ex_sidecar);
    if (stats->parsed()) return cmd_stats(g, st_features, st_out, st_alpha, st_full, st_outliers);
    if (cv->parsed()) {
      if (cv_task != "class" && cv_task != "reg") throw UsageError("--task must be class or reg");
      return cmd_cv(g, cv_features, cv_model, cv_task == "reg", cv_set, cv_folds,
                    cv_out, cv_no_strat);
    }
    if (train->parsed()) {
      if (tr_task != "class" && tr_task != "reg") throw UsageError("--task must be class or reg");
      return cmd_train(g, tr_csv, tr_model, tr_task == "reg", tr_set, tr_out,
                       tr_outliers, tr_report);
    }
    if (predict->parsed()) return cmd_predict(g, pr_model, pr_test, pr_out, pr_report);
    throw UsageError("no subcommand");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
