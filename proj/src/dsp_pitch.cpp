#include <algorithm>
#include <cmath>
#include <vector>
#include <cstdio>

#include "adspeech/dsp.hpp"
#include "adspeech/error.hpp"
#include "adspeech/parallel.hpp"

namespace adspeech {

namespace {

struct Candidate {
  double f0 = 0;        // Hz
  double r = 0;         // NCC peak value
  double strength = 0;  // r with the octave bias, or the unvoiced floor
  bool voiced = false;
};

// Gaussian analysis weights over a window of `len` samples.
std::vector<double> gaussian_weights(std::size_t len) {
  std::vector<double> g(len);
  const double center = (static_cast<double>(len) - 1.0) / 2.0;
  const double sigma = static_cast<double>(len) / 6.0;
  for (std::size_t n = 0; n < len; ++n) {
    double z = (static_cast<double>(n) - center) / sigma;
    g[n] = std::exp(-0.5 * z * z);
  }
  return g;
}

// Gaussian-weighted normalized cross-correlation between the window at
// `start` and the same window shifted by `lag`. Weighted Pearson form, so a
// perfectly periodic signal scores exactly 1 at its period and the value is
// invariant under amplitude scaling. Exactly-silent windows score 0.
double weighted_ncc(const double* x, const double* x2, const double* g,
                    const double* gx_a, double sum_g, double sum_ga,
                    double sum_ga2, std::size_t w, std::size_t start,
                    std::size_t lag) {
  const double* xb = x + start + lag;
  const double* xb2 = x2 + start + lag;
  double sb = 0, sb2 = 0, sab = 0;
  for (std::size_t n = 0; n < w; ++n) {
    sb += g[n] * xb[n];
    sb2 += g[n] * xb2[n];
    sab += gx_a[n] * xb[n];
  }
  const double mu_a = sum_ga / sum_g;
  const double mu_b = sb / sum_g;
  const double den_a = sum_ga2 - sum_g * mu_a * mu_a;
  const double den_b = sb2 - sum_g * mu_b * mu_b;
  if (den_a <= 0.0 || den_b <= 0.0) return 0.0;
  const double num = sab - sum_g * mu_a * mu_b;
  return num / std::sqrt(den_a * den_b);
}

// Windowed-sinc low-pass and take every step-th sample; sample m of the
// result sits at original index m*step.
std::vector<double> decimate(const std::vector<double>& x, int step) {
  if (step <= 1) return x;
  const int half = 4 * step;
  const double cutoff = 0.45 / step;  // cycles per original sample
  std::vector<double> h(2 * half + 1);
  double sum = 0;
  for (int k = -half; k <= half; ++k) {
    double v;
    if (k == 0) {
      v = 2.0 * cutoff;
    } else {
      double p = 3.14159265358979323846 * k;
      v = std::sin(2.0 * cutoff * p) / p;
    }
    v *= 0.5 + 0.5 * std::cos(3.14159265358979323846 * k / (half + 1.0));
    h[k + half] = v;
    sum += v;
  }
  for (double& v : h) v /= sum;

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> y(x.size() / step);
  for (std::size_t m = 0; m < y.size(); ++m) {
    const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(m) * step;
    double acc = 0;
    const std::ptrdiff_t k0 = std::max<std::ptrdiff_t>(-half, c - (n - 1));
    const std::ptrdiff_t k1 = std::min<std::ptrdiff_t>(half, c);
    for (std::ptrdiff_t k = k0; k <= k1; ++k) acc += h[k + half] * x[c - k];
    y[m] = acc;
  }
  return y;
}

}  // namespace

PitchContour pitch_track(const AudioClip& clip, const PitchConfig& cfg) {
  if (cfg.floor_hz >= cfg.ceiling_hz || cfg.floor_hz <= 0) {
    throw DataError("pitch_track: floor must be positive and below ceiling");
  }
  const double fs = clip.sample_rate;
  const std::size_t n = clip.samples.size();
  const std::size_t w = static_cast<std::size_t>(std::lround(cfg.window_s * fs));
  const std::size_t step = static_cast<std::size_t>(std::lround(cfg.step_s * fs));
  const std::size_t lag_min = static_cast<std::size_t>(std::ceil(fs / cfg.ceiling_hz));
  const std::size_t lag_max = static_cast<std::size_t>(std::floor(fs / cfg.floor_hz));
  if (clip.duration() < cfg.window_s || n < w + lag_max + 2 || step == 0 ||
      lag_min < 2) {
    throw DataError("pitch_track: clip too short for the analysis window");
  }

  const std::size_t c_first = w / 2;
  const std::size_t c_last = n - (w - w / 2) - lag_max - 1;
  if (c_last < c_first) throw DataError("pitch_track: clip too short for the analysis window");
  const std::size_t frames = (c_last - c_first) / step + 1;

  const double* x = clip.samples.data();
  std::vector<double> x2(n);
  for (std::size_t i = 0; i < n; ++i) x2[i] = x[i] * x[i];

  // Coarse stage runs on a ~4 kHz decimated copy; winners are re-measured
  // at the full rate, so decimation only affects which lags get refined.
  // The envelope copy keeps pulse-train periodicity visible even when the
  // pulse carrier sits above the decimated band; its spurious half-period
  // peaks die in full-rate re-measurement.
  const int dec = std::max(1, static_cast<int>(fs / 4000.0));
  std::vector<double> xd = decimate(clip.samples, dec);
  std::vector<double> xd2(xd.size());
  for (std::size_t i = 0; i < xd.size(); ++i) xd2[i] = xd[i] * xd[i];
  std::vector<double> rect(n);
  for (std::size_t i = 0; i < n; ++i) rect[i] = std::fabs(clip.samples[i]);
  std::vector<double> ed = decimate(rect, dec);
  std::vector<double> ed2(ed.size());
  for (std::size_t i = 0; i < ed.size(); ++i) ed2[i] = ed[i] * ed[i];

  const std::size_t wd = std::max<std::size_t>(8, w / dec);
  const std::vector<double> g = gaussian_weights(w);
  const std::vector<double> gd = gaussian_weights(wd);
  const double sum_g = [&] { double s = 0; for (double v : g) s += v; return s; }();
  const double sum_gd = [&] { double s = 0; for (double v : gd) s += v; return s; }();

  const std::size_t lagd_min = std::max<std::size_t>(2, (lag_min + dec - 1) / dec);
  const std::size_t lagd_max = std::max(lagd_min + 2, lag_max / dec);

  PitchContour pc;
  pc.floor_hz = cfg.floor_hz;
  pc.ceiling_hz = cfg.ceiling_hz;
  pc.step_s = static_cast<double>(step) / fs;
  pc.frame_times.resize(frames);
  pc.f0.assign(frames, 0.0);
  pc.voiced.assign(frames, 0);
  pc.strength.assign(frames, 0.0);

  std::vector<std::vector<Candidate>> cands(frames);

  for_index(frames, cfg.parallel, [&](std::size_t k) {
    const std::size_t c = c_first + k * step;
    pc.frame_times[k] = static_cast<double>(c) / fs;

    // Coarse sweeps on the decimated waveform and envelope.
    const std::size_t cd = c / dec;
    const std::size_t sd = cd >= wd / 2 ? cd - wd / 2 : 0;
    std::vector<std::pair<double, std::size_t>> peaks;
    auto sweep = [&](const std::vector<double>& sig, const std::vector<double>& sig2) {
      if (sd + wd + lagd_max >= sig.size()) return;
      std::vector<double> gxa(wd);
      double sum_ga = 0, sum_ga2 = 0;
      for (std::size_t i = 0; i < wd; ++i) {
        gxa[i] = gd[i] * sig[sd + i];
        sum_ga += gxa[i];
        sum_ga2 += gxa[i] * sig[sd + i];
      }
      std::vector<double> r_dec(lagd_max + 1, 0.0);
      for (std::size_t lag = lagd_min; lag <= lagd_max; ++lag) {
        r_dec[lag] = weighted_ncc(sig.data(), sig2.data(), gd.data(), gxa.data(),
                                  sum_gd, sum_ga, sum_ga2, wd, sd, lag);
      }
      for (std::size_t lag = lagd_min; lag <= lagd_max; ++lag) {
        const double rl = r_dec[lag];
        if (rl <= 0) continue;
        const double prev = lag > lagd_min ? r_dec[lag - 1] : -1.0;
        const double next = lag < lagd_max ? r_dec[lag + 1] : -1.0;
        if (rl > prev && rl >= next) peaks.emplace_back(rl, lag);
      }
    };
    sweep(xd, xd2);
    sweep(ed, ed2);
    if (peaks.empty()) return;  // silent or edge frame: unvoiced only

    // near-equal coarse peaks prefer the shorter lag, so a period's own
    // window never loses its candidate slot to its harmonics
    std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
      const long qa = std::lround(std::floor(a.first * 256.0));
      const long qb = std::lround(std::floor(b.first * 256.0));
      if (qa != qb) return qa > qb;
      return a.second < b.second;
    });
    // drop coarse peaks whose refinement window an earlier peak already covers
    {
      std::vector<std::pair<double, std::size_t>> kept;
      for (const auto& p : peaks) {
        bool covered = false;
        for (const auto& q : kept) {
          const std::size_t gap = p.second > q.second ? p.second - q.second
                                                      : q.second - p.second;
          if (gap * static_cast<std::size_t>(dec) <= static_cast<std::size_t>(dec) + 4) {
            covered = true;
          }
        }
        if (!covered) kept.push_back(p);
        if (kept.size() >= static_cast<std::size_t>(cfg.max_candidates)) break;
      }
      peaks = std::move(kept);
    }

    // Full-rate refinement around each coarse winner, then a parabolic fit
    // for sub-sample lag and peak value.
    const std::size_t s = c - w / 2;
    std::vector<double> gxa(w);
    double sum_ga = 0, sum_ga2 = 0;
    for (std::size_t i = 0; i < w; ++i) {
      gxa[i] = g[i] * x[s + i];
      sum_ga += gxa[i];
      sum_ga2 += gxa[i] * x[s + i];
    }

    // The NCC is a correlation of band-limited signals, so between integer
    // lags it is band-limited in the lag variable; windowed-sinc
    // interpolation recovers the true peak where a parabola would
    // underestimate half-sample-offset peaks of strongly oscillating
    // curves (and so flip octave decisions).
    auto interp_r = [](const std::vector<double>& rr, double pos) {
      const std::ptrdiff_t n_r = static_cast<std::ptrdiff_t>(rr.size());
      const std::ptrdiff_t k0 = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(pos) - 7);
      const std::ptrdiff_t k1 = std::min(n_r - 1, static_cast<std::ptrdiff_t>(pos) + 8);
      double acc = 0, wsum = 0;
      for (std::ptrdiff_t kk = k0; kk <= k1; ++kk) {
        const double u = pos - static_cast<double>(kk);
        double wv;
        if (std::fabs(u) < 1e-9) {
          wv = 1.0;
        } else {
          const double pu = 3.14159265358979323846 * u;
          wv = std::sin(pu) / pu * (0.5 + 0.5 * std::cos(pu / 8.0));
        }
        acc += wv * rr[static_cast<std::size_t>(kk)];
        wsum += wv;
      }
      return wsum != 0 ? acc / wsum : 0.0;
    };

    std::vector<Candidate>& out = cands[k];
    for (const auto& peak : peaks) {
      const std::size_t center = peak.second * static_cast<std::size_t>(dec);
      // full-rate re-measure around the coarse winner
      const std::size_t span = static_cast<std::size_t>(dec) + 6;
      const std::size_t lo = std::max(lag_min, center > span ? center - span : lag_min);
      const std::size_t hi = std::min(lag_max, center + span);
      if (lo + 2 > hi) continue;
      std::vector<double> rr(hi - lo + 1);
      std::size_t best = lo + 1;
      double rb = -2;
      for (std::size_t lag = lo; lag <= hi; ++lag) {
        rr[lag - lo] = weighted_ncc(x, x2.data(), g.data(), gxa.data(), sum_g,
                                    sum_ga, sum_ga2, w, s, lag);
        if (rr[lag - lo] > rb && lag > lo && lag < hi) {
          rb = rr[lag - lo];
          best = lag;
        }
      }
      double best_pos = static_cast<double>(best - lo);
      double best_val = rr[best - lo];
      for (double pos = best_pos - 1.0; pos <= best_pos + 1.0; pos += 1.0 / 64.0) {
        if (pos <= 0 || pos >= static_cast<double>(rr.size() - 1)) continue;
        const double v = interp_r(rr, pos);
        if (v > best_val) {
          best_val = v;
          best_pos = pos;
        }
      }
      const double lag_star = static_cast<double>(lo) + best_pos;
      Candidate cand;
      cand.f0 = std::clamp(fs / lag_star, cfg.floor_hz, cfg.ceiling_hz);
      cand.r = std::min(best_val, 1.0);
      if (cand.r <= 0) continue;
      cand.strength = cand.r - cfg.octave_cost * std::log2(cfg.ceiling_hz / cand.f0);
      cand.voiced = true;
      bool dup = false;
      for (const Candidate& kept : out) {
        if (std::fabs(kept.f0 - cand.f0) < 1e-6) dup = true;
      }
      if (!dup) out.push_back(cand);
    }
  });

  // Least-cost path over candidates (plus an unvoiced candidate per frame).
  std::vector<std::vector<double>> score(frames);
  std::vector<std::vector<int>> from(frames);
  auto options = [&](std::size_t k) { return cands[k].size() + 1; };
  auto cand_at = [&](std::size_t k, std::size_t j) -> Candidate {
    if (j < cands[k].size()) return cands[k][j];
    Candidate unv;
    unv.strength = cfg.voicing_threshold;
    return unv;
  };
  for (std::size_t k = 0; k < frames; ++k) {
    score[k].assign(options(k), 0.0);
    from[k].assign(options(k), -1);
    for (std::size_t j = 0; j < options(k); ++j) {
      const Candidate cur = cand_at(k, j);
      if (k == 0) {
        score[k][j] = cur.strength;
        continue;
      }
      double best = -1e300;
      int arg = 0;
      for (std::size_t p = 0; p < options(k - 1); ++p) {
        const Candidate prev = cand_at(k - 1, p);
        double cost;
        if (prev.voiced && cur.voiced) {
          cost = cfg.octave_jump_cost * std::fabs(std::log2(cur.f0 / prev.f0));
        } else if (prev.voiced != cur.voiced) {
          cost = cfg.voiced_unvoiced_cost;
        } else {
          cost = 0.0;
        }
        const double total = score[k - 1][p] - cost;
        if (total > best) {
          best = total;
          arg = static_cast<int>(p);
        }
      }
      score[k][j] = best + cur.strength;
      from[k][j] = arg;
    }
  }

#ifdef ADSPEECH_PITCH_DEBUG
  for (std::size_t k = 0; k < std::min<std::size_t>(frames, 4); ++k) {
    std::fprintf(stderr, "frame %zu:", k);
    for (const Candidate& cand : cands[k]) {
      std::fprintf(stderr, "  f0=%.2f r=%.6f s=%.6f", cand.f0, cand.r, cand.strength);
    }
    std::fprintf(stderr, "\n");
  }
#endif
  std::size_t j = 0;
  for (std::size_t cand = 1; cand < options(frames - 1); ++cand) {
    if (score[frames - 1][cand] > score[frames - 1][j]) j = cand;
  }
  for (std::size_t k = frames; k-- > 0;) {
    const Candidate chosen = cand_at(k, j);
    if (chosen.voiced && chosen.r >= cfg.voicing_threshold) {
      pc.voiced[k] = 1;
      pc.f0[k] = chosen.f0;
      pc.strength[k] = chosen.r;
    }
    if (k > 0) j = static_cast<std::size_t>(from[k][j]);
  }
  return pc;
}

}  // namespace adspeech
