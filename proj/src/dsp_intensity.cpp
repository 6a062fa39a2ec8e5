#include <cmath>
#include <vector>

#include "adspeech/dsp.hpp"
#include "adspeech/error.hpp"
#include "adspeech/parallel.hpp"

namespace adspeech {

IntensityContour intensity_contour(const AudioClip& clip,
                                   const IntensityConfig& cfg) {
  if (clip.samples.empty() || clip.sample_rate <= 0) {
    throw DataError("intensity_contour: empty clip");
  }
  const double fs = clip.sample_rate;
  const std::size_t n = clip.samples.size();
  std::size_t w = static_cast<std::size_t>(std::lround(cfg.window_s * fs));
  if (w == 0) w = 1;
  if (w > n) w = n;  // clips shorter than one window get a single frame
  const std::size_t step =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.step_s * fs)));

  const std::size_t c_first = w / 2;
  const std::size_t c_last = n - (w - w / 2);
  const std::size_t frames = c_last >= c_first ? (c_last - c_first) / step + 1 : 1;

  IntensityContour ic;
  ic.frame_times.resize(frames);
  ic.intensity_db.resize(frames);

  const double* x = clip.samples.data();
  constexpr double kP0Sq = 4e-10;  // (2e-5 Pa)^2

  for_index(frames, cfg.parallel, [&](std::size_t k) {
    const std::size_t c = c_first + k * step;
    const std::size_t s = c - w / 2;
    double acc = 0;
    for (std::size_t i = 0; i < w; ++i) acc += x[s + i] * x[s + i];
    const double mean_sq = acc / static_cast<double>(w);
    ic.frame_times[k] = static_cast<double>(c) / fs;
    // digital silence floors at 0 dB so contour means stay finite
    ic.intensity_db[k] = mean_sq > 0 ? 10.0 * std::log10(mean_sq / kP0Sq) : 0.0;
  });
  return ic;
}

}  // namespace adspeech
