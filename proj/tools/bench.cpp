// Times the OpenMP kernels against their serial reference: pitch tracking,
// per-session extraction and forest training.
#include <chrono>
#include <cstdio>
#include <vector>

#include "adspeech/cv.hpp"
#include "adspeech/dsp.hpp"
#include "adspeech/models.hpp"
#include "adspeech/parallel.hpp"
#include "adspeech/rng.hpp"
#include "adspeech/synth.hpp"

using namespace adspeech;
namespace chrono = std::chrono;

namespace {

template <class F>
double time_ms(F&& f) {
  double best = 1e18;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = chrono::high_resolution_clock::now();
    f();
    const auto t1 = chrono::high_resolution_clock::now();
    best = std::min(best, chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  // pitch tracking on a 20 s voiced clip
  SynthSpec spec;
  spec.f0_hz = 160.0;
  spec.jitter_target = 0.01;
  spec.segments = {{SegKind::speech, 20.0}};
  const AudioClip clip = synth_voice(spec, 1).clip;
  PitchConfig serial_cfg, parallel_cfg;
  serial_cfg.parallel = false;
  parallel_cfg.parallel = true;
  row("pitch_track",
      time_ms([&] { pitch_track(clip, serial_cfg); }),
      time_ms([&] { pitch_track(clip, parallel_cfg); }));

  // batch of clips, one slot per session
  SynthSpec small = spec;
  small.segments = {{SegKind::speech, 3.0}};
  std::vector<AudioClip> clips;
  for (int i = 0; i < 8; ++i) clips.push_back(synth_voice(small, 10 + i).clip);
  auto batch = [&](bool parallel) {
    std::vector<std::size_t> voiced(clips.size());
    for_index(clips.size(), parallel, [&](std::size_t i) {
      PitchConfig cfg;
      cfg.parallel = false;
      voiced[i] = pitch_track(clips[i], cfg).voiced_count();
    });
  };
  row("session batch (8 clips)",
      time_ms([&] { batch(false); }),
      time_ms([&] { batch(true); }));

  // random forest on a synthetic table
  Rng rng(7);
  Matrix x;
  std::vector<double> y;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> f(30);
    for (double& v : f) v = rng.normal();
    y.push_back(f[0] + 0.5 * f[1] > 0 ? 1.0 : 0.0);
    x.push_back(std::move(f));
  }
  ModelConfig cfg;
  cfg.trees = 200;
  cfg.seed = 3;
  row("rf_train (200 trees)",
      time_ms([&] {
        ModelConfig c = cfg;
        c.rf_parallel = false;
        rf_train(x, y, false, 2, c);
      }),
      time_ms([&] {
        ModelConfig c = cfg;
        c.rf_parallel = true;
        rf_train(x, y, false, 2, c);
      }));

  return 0;
}
