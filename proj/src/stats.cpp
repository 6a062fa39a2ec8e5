#include "adspeech/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adspeech/error.hpp"

namespace adspeech {

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr int max_terms = 400;
  constexpr double eps = 1e-15;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_terms; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) break;
  }
  return h;
}

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
  double acc = 0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0 && a > 0.0 && b > 0.0)) {
    throw InternalError("regularized_incomplete_beta: bad arguments");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - log_beta(b, a)) *
                   beta_cf(1.0 - x, b, a) / b;
}

double student_t_two_tailed(double t, double df) {
  if (df <= 0) throw InternalError("student_t_two_tailed: df must be positive");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
}

TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                         bool pooled_variance) {
  if (a.size() < 2 || b.size() < 2) {
    throw DataError("welch_t_test: each sample needs at least 2 values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  TTestResult res;
  res.mean_a = sample_mean(a);
  res.mean_b = sample_mean(b);
  const double va = sample_var(a, res.mean_a);
  const double vb = sample_var(b, res.mean_b);

  if (va == 0.0 && vb == 0.0) {
    res.df = na + nb - 2.0;
    if (res.mean_a == res.mean_b) {
      res.t = 0.0;
      res.p = 1.0;
    } else {
      res.t = res.mean_a > res.mean_b ? HUGE_VAL : -HUGE_VAL;
      res.p = 0.0;
    }
    return res;
  }

  if (pooled_variance) {
    const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    res.t = (res.mean_a - res.mean_b) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
    res.df = na + nb - 2.0;
  } else {
    const double ga = va / na, gb = vb / nb;
    res.t = (res.mean_a - res.mean_b) / std::sqrt(ga + gb);
    res.df = (ga + gb) * (ga + gb) /
             (ga * ga / (na - 1.0) + gb * gb / (nb - 1.0));
  }
  res.p = student_t_two_tailed(res.t, res.df);
  return res;
}

CorrResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("pearson: length mismatch");
  if (x.size() < 3) throw DataError("pearson: need at least 3 pairs");
  const double mx = sample_mean(x), my = sample_mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("pearson: zero variance input");
  CorrResult res;
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  res.n = x.size();
  return res;
}

std::pair<std::vector<StatRow>, std::vector<StatRow>> filter_outliers(
    const std::vector<StatRow>& rows, const OutlierRule& rule) {
  std::vector<std::size_t> drop;
  if (rule.drop_ad_mmse_at_ceiling) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].label == "AD" && rows[i].mmse && *rows[i].mmse == 30) {
        drop.push_back(i);
      }
    }
  }
  if (rule.drop_k_lowest_nonad_lexical > 0) {
    std::vector<std::size_t> non_ad;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].label != "AD") non_ad.push_back(i);
    }
    if (rule.drop_k_lowest_nonad_lexical >= static_cast<int>(non_ad.size())) {
      throw DataError("filter_outliers: k must be below the non-AD group size");
    }
    std::sort(non_ad.begin(), non_ad.end(), [&](std::size_t a, std::size_t b) {
      if (rows[a].lexical_mean != rows[b].lexical_mean) {
        return rows[a].lexical_mean < rows[b].lexical_mean;
      }
      return rows[a].session_id < rows[b].session_id;
    });
    non_ad.resize(static_cast<std::size_t>(rule.drop_k_lowest_nonad_lexical));
    drop.insert(drop.end(), non_ad.begin(), non_ad.end());
  }
  std::sort(drop.begin(), drop.end());
  drop.erase(std::unique(drop.begin(), drop.end()), drop.end());

  std::pair<std::vector<StatRow>, std::vector<StatRow>> out;
  std::size_t di = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (di < drop.size() && drop[di] == i) {
      out.second.push_back(rows[i]);
      ++di;
    } else {
      out.first.push_back(rows[i]);
    }
  }
  return out;
}

std::string scatter_svg(const std::vector<StatRow>& kept,
                        const std::vector<StatRow>& dropped,
                        const std::string& header_comment) {
  constexpr int width = 640, height = 480;
  constexpr double ml = 60, mr = 20, mt = 20, mb = 50;
  double x_max = 0.01;
  for (const auto* rows : {&kept, &dropped}) {
    for (const StatRow& r : *rows) x_max = std::max(x_max, r.lexical_mean);
  }
  x_max *= 1.05;

  auto px = [&](double lex) { return ml + lex / x_max * (width - ml - mr); };
  auto py = [&](double mmse) { return height - mb - mmse / 30.0 * (height - mt - mb); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!header_comment.empty()) svg << "<!-- " << header_comment << " -->\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">lexical words</text>\n";
  svg << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
      << (mt + height - mb) / 2 << ")\">MMSE</text>\n";

  for (const StatRow& r : kept) {
    if (!r.mmse) continue;
    const double cx = px(r.lexical_mean), cy = py(*r.mmse);
    const char* fill = r.label == "AD" ? "#202020" : "#9e9e9e";
    svg << "<circle class=\"session\" cx=\"" << cx << "\" cy=\"" << cy
        << "\" r=\"4\" fill=\"" << fill << "\"/>\n";
  }
  for (const StatRow& r : dropped) {
    if (!r.mmse) continue;
    const double cx = px(r.lexical_mean), cy = py(*r.mmse);
    svg << "<g class=\"outlier\" stroke=\"#b00000\" stroke-width=\"2\">"
        << "<line x1=\"" << cx - 4 << "\" y1=\"" << cy - 4 << "\" x2=\""
        << cx + 4 << "\" y2=\"" << cy + 4 << "\"/>"
        << "<line x1=\"" << cx - 4 << "\" y1=\"" << cy + 4 << "\" x2=\""
        << cx + 4 << "\" y2=\"" << cy - 4 << "\"/></g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace adspeech
