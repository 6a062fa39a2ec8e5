#include <algorithm>
#include <cmath>
#include <vector>

#include "adspeech/dsp.hpp"
#include "adspeech/error.hpp"

namespace adspeech {

namespace {

// Sub-sample peak position and magnitude from a parabola through the sample
// and its two neighbours (fit on the signed values around the peak sample).
struct RefinedPeak {
  double time;
  double value;  // |x| at the vertex
};

RefinedPeak refine_peak(const AudioClip& clip, std::size_t idx) {
  const auto& x = clip.samples;
  const double fs = clip.sample_rate;
  if (idx == 0 || idx + 1 >= x.size()) {
    return {static_cast<double>(idx) / fs, std::fabs(x[idx])};
  }
  const double ym = x[idx - 1], y0 = x[idx], yp = x[idx + 1];
  const double denom = ym - 2 * y0 + yp;
  double delta = 0;
  if ((y0 > 0 && denom < 0) || (y0 < 0 && denom > 0)) {
    delta = 0.5 * (ym - yp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
  }
  const double value = y0 - 0.25 * (ym - yp) * delta;
  return {(static_cast<double>(idx) + delta) / fs, std::fabs(value)};
}

// Largest-|x| sample in [lo, hi); first occurrence wins ties.
std::size_t peak_in(const AudioClip& clip, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  double mag = -1;
  for (std::size_t i = lo; i < hi; ++i) {
    const double m = std::fabs(clip.samples[i]);
    if (m > mag) {
      mag = m;
      best = i;
    }
  }
  return best;
}

}  // namespace

PeriodTrack extract_periods(const AudioClip& clip, const PitchContour& pc) {
  PeriodTrack pt;
  const double fs = clip.sample_rate;
  const std::size_t n = clip.samples.size();
  if (pc.frame_times.empty()) return pt;

  const double t_min = 1.0 / pc.ceiling_hz * 0.75;
  const double t_max = 1.0 / pc.floor_hz * 1.25;

  auto local_period = [&](double t) {
    // pitch period at the nearest voiced frame
    double idx = (t - pc.frame_times.front()) / pc.step_s;
    std::ptrdiff_t k = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::lround(idx)), 0,
        static_cast<std::ptrdiff_t>(pc.frame_times.size()) - 1);
    for (std::ptrdiff_t off = 0; off < static_cast<std::ptrdiff_t>(pc.frame_times.size()); ++off) {
      if (k - off >= 0 && pc.voiced[k - off]) return 1.0 / pc.f0[k - off];
      if (k + off < static_cast<std::ptrdiff_t>(pc.voiced.size()) && pc.voiced[k + off]) {
        return 1.0 / pc.f0[k + off];
      }
    }
    return 0.0;
  };

  // Maximal voiced frame runs define the regions to mark.
  std::size_t k = 0;
  while (k < pc.voiced.size()) {
    if (!pc.voiced[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < pc.voiced.size() && pc.voiced[end]) ++end;
    const double region_begin = pc.frame_times[k] - pc.step_s / 2;
    const double region_end = pc.frame_times[end - 1] + pc.step_s / 2;
    k = end;

    const std::size_t lo = static_cast<std::size_t>(
        std::max(0.0, std::floor(region_begin * fs)));
    const std::size_t hi = std::min(
        n, static_cast<std::size_t>(std::ceil(region_end * fs)) + 1);
    if (hi <= lo + 2) continue;

    // Seed on the strongest peak, then chain outward one local period at a
    // time, searching inside +-25% of the period.
    const std::size_t seed = peak_in(clip, lo, hi);
    std::vector<std::size_t> pulses = {seed};
    for (int dir : {+1, -1}) {
      std::size_t cur = seed;
      while (true) {
        const double t_cur = static_cast<double>(cur) / fs;
        const double period = local_period(t_cur);
        if (period <= 0) break;
        const double target = t_cur + dir * period;
        const double w_lo = target - 0.25 * period;
        const double w_hi = target + 0.25 * period;
        if (w_lo < region_begin - 0.5 * period || w_hi > region_end + 0.5 * period) break;
        const std::ptrdiff_t s_lo = static_cast<std::ptrdiff_t>(std::floor(w_lo * fs));
        const std::ptrdiff_t s_hi = static_cast<std::ptrdiff_t>(std::ceil(w_hi * fs));
        if (s_lo < 0 || s_hi >= static_cast<std::ptrdiff_t>(n) || s_hi <= s_lo) break;
        const std::size_t nxt = peak_in(clip, static_cast<std::size_t>(s_lo),
                                        static_cast<std::size_t>(s_hi));
        if (std::fabs(clip.samples[nxt]) <= 0.0) break;  // ran into silence
        if (dir > 0) {
          pulses.push_back(nxt);
        } else {
          pulses.insert(pulses.begin(), nxt);
        }
        cur = nxt;
      }
    }
    if (pulses.size() < 3) continue;  // too few pulses to trust

    std::vector<RefinedPeak> refined;
    refined.reserve(pulses.size());
    for (std::size_t p : pulses) refined.push_back(refine_peak(clip, p));

    auto period_ok = [&](std::size_t i) {
      const double period = refined[i + 1].time - refined[i].time;
      return period >= t_min && period <= t_max;
    };

    // Maximal runs of in-range periods; a run needs at least 3 pulses.
    std::size_t i = 0;
    while (i + 1 < refined.size()) {
      if (!period_ok(i)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < refined.size() && period_ok(j)) ++j;
      if (j - i + 1 >= 3) {
        for (std::size_t p = i; p <= j; ++p) pt.pulse_times.push_back(refined[p].time);
        for (std::size_t p = i; p < j; ++p) {
          const double period = refined[p + 1].time - refined[p].time;
          // amplitude of a period: peak |x| over its cycle
          const std::size_t a = static_cast<std::size_t>(refined[p].time * fs);
          const std::size_t b = std::min(
              n, static_cast<std::size_t>(refined[p + 1].time * fs) + 1);
          const std::size_t pk = b > a ? peak_in(clip, a, b) : a;
          const RefinedPeak amp = refine_peak(clip, pk);
          pt.periods.push_back(period);
          pt.amplitudes.push_back(amp.value);
        }
      }
      i = j;
    }
  }
  return pt;
}

HarmonicityResult harmonicity(const AudioClip& clip, const PitchContour& pc) {
  (void)clip;  // the per-frame NCC values were measured during tracking
  double acc = 0;
  std::size_t voiced = 0;
  for (std::size_t k = 0; k < pc.voiced.size(); ++k) {
    if (!pc.voiced[k]) continue;
    double r = std::clamp(pc.strength[k], 1e-9, 1.0 - 1e-9);
    acc += r;
    ++voiced;
  }
  if (voiced == 0) throw DataError("harmonicity: no voiced speech");
  HarmonicityResult h;
  h.autocorr_mean = acc / static_cast<double>(voiced);
  h.hnr_db = 10.0 * std::log10(h.autocorr_mean / (1.0 - h.autocorr_mean));
  h.nhr = (1.0 - h.autocorr_mean) / h.autocorr_mean;
  return h;
}

}  // namespace adspeech
