#include <algorithm>
#include <cmath>
#include <vector>

#include "adspeech/dsp.hpp"
#include "adspeech/error.hpp"

namespace adspeech {

NucleusTrack detect_nuclei(const AudioClip& clip, const IntensityContour& ic,
                           const PitchContour& pc, const NucleusConfig& cfg) {
  NucleusTrack nt;
  const double dur = clip.duration();
  if (ic.frame_times.empty()) {
    nt.pause_spans.push_back({0.0, dur});
    return nt;
  }

  double max_db = *std::max_element(ic.intensity_db.begin(), ic.intensity_db.end());
  const double threshold = max_db - cfg.silence_threshold_db;

  // A frame is silent below the threshold; exact digital silence (the 0 dB
  // floor) is silent regardless of where the threshold lands.
  const std::size_t frames = ic.frame_times.size();
  auto silent = [&](std::size_t k) {
    return ic.intensity_db[k] == 0.0 || ic.intensity_db[k] < threshold;
  };

  const double step = frames > 1 ? ic.frame_times[1] - ic.frame_times[0] : dur;

  // Frame runs -> time spans; the first and last runs extend to the clip
  // edges that the analysis window cannot cover.
  struct Run {
    bool speech;
    double begin, end;
  };
  std::vector<Run> runs;
  std::size_t k = 0;
  while (k < frames) {
    const bool sp = !silent(k);
    std::size_t end = k;
    while (end < frames && !silent(end) == sp) ++end;
    double b = k == 0 ? 0.0 : ic.frame_times[k] - step / 2;
    double e = end == frames ? dur : ic.frame_times[end - 1] + step / 2;
    runs.push_back({sp, b, e});
    k = end;
  }

  // Pauses shorter than min_pause merge into the surrounding speech.
  std::vector<Run> merged;
  for (const Run& r : runs) {
    if (!r.speech && r.end - r.begin < cfg.min_pause_s && !merged.empty() &&
        merged.back().speech) {
      merged.back().end = r.end;
      continue;
    }
    if (!merged.empty() && merged.back().speech == r.speech) {
      merged.back().end = r.end;
    } else {
      merged.push_back(r);
    }
  }
  // a short leading pause attaches to the following speech
  if (merged.size() >= 2 && !merged.front().speech &&
      merged.front().end - merged.front().begin < cfg.min_pause_s &&
      merged[1].speech) {
    merged[1].begin = merged.front().begin;
    merged.erase(merged.begin());
  }

  auto voiced_near = [&](double t) {
    if (pc.frame_times.empty()) return false;
    double idx = (t - pc.frame_times.front()) / pc.step_s;
    std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::lround(idx)), 0,
        static_cast<std::ptrdiff_t>(pc.frame_times.size()) - 1);
    return pc.voiced[j] != 0;
  };

  for (const Run& r : merged) {
    if (!r.speech) {
      nt.pause_spans.push_back({r.begin, r.end});
      continue;
    }
    nt.phonation_time += r.end - r.begin;

    // Intensity maxima inside the span: above threshold, preceded by a dip
    // of at least dip_db since the last nucleus, voiced at the nearest pitch
    // frame. The span begins right after silence, so the first rise gets
    // credited with a dip from the silence floor.
    std::size_t first = 0;
    while (first < frames && ic.frame_times[first] < r.begin) ++first;
    double running_min = threshold - cfg.dip_db;
    for (std::size_t f = first; f < frames && ic.frame_times[f] <= r.end; ++f) {
      const double v = ic.intensity_db[f];
      running_min = std::min(running_min, v);
      const bool peak = (f == 0 || ic.intensity_db[f - 1] < v) &&
                        (f + 1 >= frames || ic.intensity_db[f + 1] <= v);
      if (!peak || v < threshold) continue;
      if (v - running_min < cfg.dip_db) continue;
      if (!voiced_near(ic.frame_times[f])) continue;
      nt.nucleus_times.push_back(ic.frame_times[f]);
      running_min = v;
    }
  }
  return nt;
}

}  // namespace adspeech
