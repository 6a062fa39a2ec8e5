#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adspeech/error.hpp"
#include "adspeech/synth.hpp"

using namespace adspeech;

TEST_CASE("zero-perturbation spec gives a strictly periodic train") {
  SynthSpec spec;
  spec.f0_hz = 200.0;
  spec.segments = {{SegKind::speech, 2.0}};
  SynthVoice v = synth_voice(spec, 7);
  REQUIRE(v.periods.size() > 300);
  for (double t : v.periods) CHECK(t == doctest::Approx(0.005).epsilon(1e-12));
  // realized periods equal 1/f0 within one sample interval, trivially
  for (double t : v.periods) CHECK(std::fabs(t - 0.005) < 1.0 / spec.sample_rate);
}

TEST_CASE("jitter target is realized in the emitted period list") {
  SynthSpec spec;
  spec.f0_hz = 120.0;
  spec.jitter_target = 0.01;
  spec.segments = {{SegKind::speech, 2.0}};
  SynthVoice v = synth_voice(spec, 11);
  const double realized = local_jitter(v.periods);
  CHECK(realized > 0.0095);
  CHECK(realized < 0.0105);
}

TEST_CASE("shimmer target is realized in the emitted amplitude list") {
  SynthSpec spec;
  spec.f0_hz = 150.0;
  spec.shimmer_target = 0.05;
  spec.segments = {{SegKind::speech, 2.0}};
  SynthVoice v = synth_voice(spec, 3);
  const double realized = local_shimmer(v.amplitudes);
  CHECK(realized == doctest::Approx(0.05).epsilon(0.02));
}

TEST_CASE("segment plan boundaries are exact") {
  SynthSpec spec;
  spec.f0_hz = 200.0;
  spec.segments = {{SegKind::speech, 2.0}, {SegKind::pause, 2.0}};
  SynthVoice v = synth_voice(spec, 5);
  REQUIRE(v.pause_spans.size() == 1);
  CHECK(v.pause_spans[0].begin == doctest::Approx(2.0));
  CHECK(v.pause_spans[0].end == doctest::Approx(4.0));
  // silence is exact over the pause span
  const std::size_t a = static_cast<std::size_t>(2.0 * spec.sample_rate);
  for (std::size_t i = a; i < v.clip.samples.size(); ++i) {
    CHECK(v.clip.samples[i] == 0.0);
  }
}

TEST_CASE("synthesis is deterministic given spec and seed") {
  SynthSpec spec;
  spec.f0_hz = 180.0;
  spec.jitter_target = 0.02;
  spec.shimmer_target = 0.03;
  spec.noise_snr_db = 20.0;
  SynthVoice a = synth_voice(spec, 99);
  SynthVoice b = synth_voice(spec, 99);
  REQUIRE(a.clip.samples.size() == b.clip.samples.size());
  for (std::size_t i = 0; i < a.clip.samples.size(); ++i) {
    CHECK(a.clip.samples[i] == b.clip.samples[i]);  // bit identical
  }
  SynthVoice c = synth_voice(spec, 100);
  bool different = false;
  for (std::size_t i = 0; i < a.clip.samples.size() && !different; ++i) {
    if (a.clip.samples[i] != c.clip.samples[i]) different = true;
  }
  CHECK(different);
}

TEST_CASE("noise is mixed to the requested SNR") {
  SynthSpec clean_spec;
  clean_spec.f0_hz = 150.0;
  clean_spec.segments = {{SegKind::speech, 2.0}};
  SynthSpec noisy_spec = clean_spec;
  noisy_spec.noise_snr_db = 10.0;
  SynthVoice clean = synth_voice(clean_spec, 8);
  SynthVoice noisy = synth_voice(noisy_spec, 8);

  // The pulse draws come first in the stream, so the rendered speech in
  // both clips matches up to the final normalization; measure noise power
  // as the difference.
  double sp = 0, np = 0;
  for (std::size_t i = 0; i < clean.clip.samples.size(); ++i) {
    sp += clean.clip.samples[i] * clean.clip.samples[i];
    const double scale = noisy.amplitudes[0] / clean.amplitudes[0];
    const double d = noisy.clip.samples[i] / scale - clean.clip.samples[i];
    np += d * d;
  }
  const double snr_db = 10.0 * std::log10(sp / np);
  CHECK(snr_db == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("infeasible spec is rejected") {
  SynthSpec spec;
  spec.f0_hz = 100.0;  // 10 ms period
  spec.segments = {{SegKind::speech, 0.005}};
  CHECK_THROWS_WITH_AS(synth_voice(spec, 1),
                       doctest::Contains("period longer"), DataError);
}

TEST_CASE("pause-only plan yields no pulses") {
  SynthSpec spec;
  spec.segments = {{SegKind::pause, 0.5}};
  SynthVoice v = synth_voice(spec, 1);
  CHECK(v.pulse_times.empty());
  CHECK(v.periods.empty());
  for (double s : v.clip.samples) CHECK(s == 0.0);
}
