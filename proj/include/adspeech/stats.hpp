#pragma once

#include <optional>
#include <string>
#include <vector>

namespace adspeech {

struct TTestResult {
  std::string feature_name;
  double mean_a = 0, mean_b = 0;
  double t = 0;
  double df = 0;
  double p = 1;  // two-tailed
};

struct CorrResult {
  std::string feature_name;
  double r = 0;
  std::size_t n = 0;
};

struct OutlierRule {
  bool drop_ad_mmse_at_ceiling = false;
  int drop_k_lowest_nonad_lexical = 0;
};

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

/// Two-tailed Student-t tail probability for |t| with df degrees of freedom.
double student_t_two_tailed(double t, double df);

/// Welch's two-sample two-tailed t-test with Welch-Satterthwaite degrees of
/// freedom. Config can request the pooled-variance (Student) form instead.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                         bool pooled_variance = false);

CorrResult pearson(const std::vector<double>& x, const std::vector<double>& y);

/// One row of the Table-1-style report.
struct SignificanceRow {
  std::string feature_name;
  double mean_non_ad = 0, mean_ad = 0;
  std::optional<double> p;  // absent for degenerate features
};

struct StatRow {
  std::string session_id;
  std::string label;  // "AD" / "nonAD"
  std::optional<int> mmse;
  double lexical_mean = 0;
};

/// Splits the rows by the outlier rule: AD rows with mmse == 30 when
/// enabled, plus the k non-AD rows with the lowest lexical mean (ties break
/// on session id). Returns kept and dropped partitions in input order.
std::pair<std::vector<StatRow>, std::vector<StatRow>> filter_outliers(
    const std::vector<StatRow>& rows, const OutlierRule& rule);

/// Fig-1-style SVG scatter: lexical mean on x, MMSE on y, non-AD grey,
/// dropped outliers drawn as 'x'. Returns the SVG document.
std::string scatter_svg(const std::vector<StatRow>& kept,
                        const std::vector<StatRow>& dropped,
                        const std::string& header_comment);

}  // namespace adspeech
