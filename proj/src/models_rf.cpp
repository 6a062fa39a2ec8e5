#include <algorithm>
#include <cmath>
#include <numeric>

#include "adspeech/error.hpp"
#include "adspeech/models.hpp"
#include "adspeech/parallel.hpp"
#include "adspeech/rng.hpp"

namespace adspeech {

namespace {

struct TreeBuilder {
  const Matrix& x;
  const std::vector<double>& y;
  bool regression;
  int n_classes;
  int max_depth;
  int min_split;
  int mtry;
  Rng& rng;
  Tree tree;

  int build(std::vector<std::size_t>& rows, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    // leaf value now; may be overwritten by a split below
    double leaf;
    bool pure;
    if (regression) {
      double mean = 0;
      for (std::size_t r : rows) mean += y[r];
      mean /= static_cast<double>(rows.size());
      leaf = mean;
      pure = std::all_of(rows.begin(), rows.end(),
                         [&](std::size_t r) { return y[r] == y[rows[0]]; });
    } else {
      std::vector<long> counts(static_cast<std::size_t>(n_classes), 0);
      for (std::size_t r : rows) counts[static_cast<std::size_t>(y[r])] += 1;
      int best = 0;
      for (int c = 1; c < n_classes; ++c) {
        if (counts[c] > counts[best]) best = c;
      }
      leaf = best;
      pure = std::count(counts.begin(), counts.end(), 0L) ==
             static_cast<long>(counts.size()) - 1;
    }
    tree.nodes[node_id].value = leaf;

    if (pure || rows.size() < static_cast<std::size_t>(min_split) ||
        (max_depth > 0 && depth >= max_depth)) {
      return node_id;
    }

    // sample mtry distinct features, then scan them in index order so the
    // chosen split does not depend on sampling order
    const std::size_t d = x[0].size();
    std::vector<std::size_t> feats(d);
    std::iota(feats.begin(), feats.end(), 0);
    for (int i = 0; i < mtry && static_cast<std::size_t>(i) < d; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
      std::swap(feats[static_cast<std::size_t>(i)], feats[j]);
    }
    feats.resize(std::min<std::size_t>(static_cast<std::size_t>(mtry), d));
    std::sort(feats.begin(), feats.end());

    double best_gain = 1e-12;
    std::size_t best_feat = 0;
    double best_threshold = 0;

    std::vector<std::pair<double, std::size_t>> order(rows.size());
    for (std::size_t f : feats) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        order[i] = {x[rows[i]][f], rows[i]};
      }
      std::sort(order.begin(), order.end());

      if (regression) {
        double total = 0, total_sq = 0;
        for (const auto& [v, r] : order) {
          total += y[r];
          total_sq += y[r] * y[r];
        }
        const double n = static_cast<double>(order.size());
        const double parent_sse = total_sq - total * total / n;
        double lsum = 0, lsq = 0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          const double yv = y[order[i].second];
          lsum += yv;
          lsq += yv * yv;
          if (order[i].first == order[i + 1].first) continue;
          const double nl = static_cast<double>(i + 1);
          const double nr = n - nl;
          const double left_sse = lsq - lsum * lsum / nl;
          const double rsum = total - lsum, rsq = total_sq - lsq;
          const double right_sse = rsq - rsum * rsum / nr;
          const double gain = parent_sse - left_sse - right_sse;
          if (gain > best_gain) {
            best_gain = gain;
            best_feat = f;
            best_threshold = (order[i].first + order[i + 1].first) / 2.0;
          }
        }
      } else {
        std::vector<double> total(static_cast<std::size_t>(n_classes), 0);
        for (const auto& [v, r] : order) total[static_cast<std::size_t>(y[r])] += 1;
        const double n = static_cast<double>(order.size());
        auto gini_term = [](const std::vector<double>& c, double m) {
          double acc = 0;
          for (double v : c) acc += v * v;
          return m - acc / m;  // m * gini
        };
        const double parent = gini_term(total, n);
        std::vector<double> left(static_cast<std::size_t>(n_classes), 0);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          left[static_cast<std::size_t>(y[order[i].second])] += 1;
          if (order[i].first == order[i + 1].first) continue;
          const double nl = static_cast<double>(i + 1);
          const double nr = n - nl;
          std::vector<double> right(static_cast<std::size_t>(n_classes));
          for (int c = 0; c < n_classes; ++c) right[c] = total[c] - left[c];
          const double gain = parent - gini_term(left, nl) - gini_term(right, nr);
          if (gain > best_gain) {
            best_gain = gain;
            best_feat = f;
            best_threshold = (order[i].first + order[i + 1].first) / 2.0;
          }
        }
      }
    }

    if (best_gain <= 1e-12) return node_id;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      (x[r][best_feat] <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) return node_id;

    rows.clear();
    rows.shrink_to_fit();
    const int left_id = build(left_rows, depth + 1);
    const int right_id = build(right_rows, depth + 1);
    tree.nodes[node_id].feature = static_cast<int>(best_feat);
    tree.nodes[node_id].threshold = best_threshold;
    tree.nodes[node_id].left = left_id;
    tree.nodes[node_id].right = right_id;
    return node_id;
  }
};

}  // namespace

RfParams rf_train(const Matrix& x, const std::vector<double>& y, bool regression,
                  int n_classes, const ModelConfig& cfg) {
  if (x.size() < 2) throw DataError("rf: need at least 2 samples");
  if (x[0].empty()) throw DataError("rf: need at least 1 feature");
  if (!regression && n_classes < 2) throw DataError("rf: need at least 2 classes");
  if (cfg.trees < 1) throw DataError("rf: trees must be >= 1");

  const std::size_t d = x[0].size();
  const int mtry = cfg.mtry > 0
                       ? cfg.mtry
                       : static_cast<int>(std::floor(std::log2(static_cast<double>(d)))) + 1;

  RfParams rf;
  rf.trees.resize(static_cast<std::size_t>(cfg.trees));
  // each tree draws from its own derived stream, so the forest is identical
  // however the loop is scheduled
  for_index(static_cast<std::size_t>(cfg.trees), cfg.rf_parallel, [&](std::size_t t) {
    Rng rng = Rng::derive(cfg.seed, t);
    std::vector<std::size_t> rows(x.size());
    if (cfg.bootstrap) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        rows[i] = static_cast<std::size_t>(rng.below(x.size()));
      }
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder{x, y, regression, n_classes, cfg.max_depth,
                        cfg.min_split, mtry, rng, {}};
    builder.build(rows, 0);
    rf.trees[t] = std::move(builder.tree);
  });
  return rf;
}

}  // namespace adspeech
