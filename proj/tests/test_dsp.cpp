#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adspeech/dsp.hpp"
#include "adspeech/error.hpp"
#include "adspeech/rng.hpp"
#include "adspeech/synth.hpp"

using namespace adspeech;

namespace {

AudioClip sine(double hz, double seconds, double amp = 1.0, int rate = 16000) {
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = amp * std::sin(2.0 * M_PI * hz * i / rate);
  }
  return clip;
}

double voiced_mean_f0(const PitchContour& pc) {
  double acc = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < pc.voiced.size(); ++k) {
    if (pc.voiced[k]) {
      acc += pc.f0[k];
      ++n;
    }
  }
  return n ? acc / n : 0.0;
}

}  // namespace

TEST_CASE("pure sine tracks within 1 Hz on every frame") {
  AudioClip clip = sine(200.0, 2.0);
  PitchContour pc = pitch_track(clip);
  REQUIRE(pc.frame_times.size() > 100);
  for (std::size_t k = 0; k < pc.voiced.size(); ++k) {
    REQUIRE(pc.voiced[k] == 1);
    CHECK(pc.f0[k] == doctest::Approx(200.0).epsilon(0.005));
    CHECK(std::fabs(pc.f0[k] - 200.0) < 1.0);
  }
  // constant frame step
  for (std::size_t k = 1; k < pc.frame_times.size(); ++k) {
    CHECK(pc.frame_times[k] - pc.frame_times[k - 1] ==
          doctest::Approx(pc.step_s).epsilon(1e-12));
  }
}

TEST_CASE("silence has zero voiced frames") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.assign(16000, 0.0);
  PitchContour pc = pitch_track(clip);
  CHECK(pc.voiced_count() == 0);
}

TEST_CASE("synthetic pulse trains track their fundamental") {
  for (double f0 : {120.0, 200.0, 330.0}) {
    SynthSpec spec;
    spec.f0_hz = f0;
    spec.segments = {{SegKind::speech, 2.0}};
    SynthVoice v = synth_voice(spec, 21);
    PitchContour pc = pitch_track(v.clip);
    REQUIRE(pc.voiced_count() > 50);
    CHECK(std::fabs(voiced_mean_f0(pc) - f0) < 2.0);
  }
}

TEST_CASE("pitch decisions are invariant under amplitude scaling") {
  SynthSpec spec;
  spec.f0_hz = 150.0;
  spec.jitter_target = 0.01;
  spec.segments = {{SegKind::speech, 1.0}};
  AudioClip clip = synth_voice(spec, 2).clip;

  PitchContour base = pitch_track(clip);
  for (double scale : {0.25, 4.0}) {  // exact in floating point
    AudioClip scaled = clip;
    for (double& s : scaled.samples) s *= scale;
    PitchContour pc = pitch_track(scaled);
    REQUIRE(pc.voiced.size() == base.voiced.size());
    for (std::size_t k = 0; k < pc.voiced.size(); ++k) {
      CHECK(pc.voiced[k] == base.voiced[k]);
      if (pc.voiced[k]) CHECK(pc.f0[k] == base.f0[k]);
    }
  }
  // non-power-of-two scaling agrees to numerical precision
  AudioClip scaled = clip;
  for (double& s : scaled.samples) s *= 0.37;
  PitchContour pc = pitch_track(scaled);
  for (std::size_t k = 0; k < pc.voiced.size(); ++k) {
    CHECK(pc.voiced[k] == base.voiced[k]);
    if (pc.voiced[k]) CHECK(pc.f0[k] == doctest::Approx(base.f0[k]).epsilon(1e-9));
  }
}

TEST_CASE("time shift by whole frames shifts labels correspondingly") {
  SynthSpec spec;
  spec.f0_hz = 180.0;
  spec.segments = {{SegKind::speech, 0.6}, {SegKind::pause, 0.4}, {SegKind::speech, 0.5}};
  AudioClip clip = synth_voice(spec, 10).clip;
  PitchContour base = pitch_track(clip);

  const std::size_t step = static_cast<std::size_t>(std::lround(base.step_s * clip.sample_rate));
  const std::size_t m = 3;
  AudioClip shifted;
  shifted.sample_rate = clip.sample_rate;
  shifted.samples.assign(m * step, 0.0);
  shifted.samples.insert(shifted.samples.end(), clip.samples.begin(), clip.samples.end());
  PitchContour moved = pitch_track(shifted);

  REQUIRE(moved.voiced.size() >= base.voiced.size());
  std::size_t agree = 0, total = 0;
  for (std::size_t k = 0; k + 1 < base.voiced.size(); ++k) {
    ++total;
    if (moved.voiced[k + m] == base.voiced[k]) ++agree;
  }
  // interior frames agree; windows touching the splice may differ
  CHECK(agree >= total - 4);
}

TEST_CASE("intensity of known signals") {
  SUBCASE("full-scale sine lands at 90.97 dB") {
    AudioClip clip = sine(200.0, 0.5);
    IntensityContour ic = intensity_contour(clip);
    REQUIRE(!ic.frame_times.empty());
    for (double db : ic.intensity_db) CHECK(db == doctest::Approx(90.969).epsilon(0.001));
  }
  SUBCASE("halving amplitude drops 6.02 dB") {
    IntensityContour full = intensity_contour(sine(200.0, 0.5, 1.0));
    IntensityContour half = intensity_contour(sine(200.0, 0.5, 0.5));
    for (std::size_t k = 0; k < full.intensity_db.size(); ++k) {
      CHECK(full.intensity_db[k] - half.intensity_db[k] ==
            doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
    }
  }
  SUBCASE("digital silence floors at 0 dB") {
    AudioClip clip;
    clip.sample_rate = 16000;
    clip.samples.assign(8000, 0.0);
    IntensityContour ic = intensity_contour(clip);
    for (double db : ic.intensity_db) CHECK(db == 0.0);
  }
}

TEST_CASE("amplitude scaling adds a constant to intensity") {
  SynthSpec spec;
  spec.f0_hz = 140.0;
  spec.segments = {{SegKind::speech, 0.8}};
  AudioClip clip = synth_voice(spec, 4).clip;
  IntensityContour base = intensity_contour(clip);
  AudioClip scaled = clip;
  for (double& s : scaled.samples) s *= 3.7;
  IntensityContour up = intensity_contour(scaled);
  const double expect = 20.0 * std::log10(3.7);
  for (std::size_t k = 0; k < base.intensity_db.size(); ++k) {
    if (base.intensity_db[k] == 0.0) continue;  // silence floor
    CHECK(up.intensity_db[k] - base.intensity_db[k] ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("period extraction on a strict 200 Hz train") {
  SynthSpec spec;
  spec.f0_hz = 200.0;
  spec.segments = {{SegKind::speech, 2.0}};
  SynthVoice v = synth_voice(spec, 31);
  PitchContour pc = pitch_track(v.clip);
  PeriodTrack pt = extract_periods(v.clip, pc);
  REQUIRE(pt.periods.size() > 200);
  const double step = 1.0 / spec.sample_rate;
  for (double t : pt.periods) CHECK(std::fabs(t - 0.005) <= step);
}

TEST_CASE("extracted periods match the planted list elementwise") {
  SynthSpec spec;
  spec.f0_hz = 120.0;
  spec.jitter_target = 0.02;
  spec.segments = {{SegKind::speech, 2.0}};
  SynthVoice v = synth_voice(spec, 17);
  PitchContour pc = pitch_track(v.clip);
  PeriodTrack pt = extract_periods(v.clip, pc);
  REQUIRE(pt.periods.size() >= v.periods.size() - 6);

  // align by nearest pulse time and compare
  const double tol = 2.0 / spec.sample_rate;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < pt.pulse_times.size(); ++i) {
    // find planted pulse nearest to the extracted one
    double best = 1e9;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < v.pulse_times.size(); ++j) {
      double d = std::fabs(v.pulse_times[j] - pt.pulse_times[i]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (i < pt.periods.size() && arg + 1 < v.pulse_times.size()) {
      const double planted = v.pulse_times[arg + 1] - v.pulse_times[arg];
      if (std::fabs(planted - pt.periods[i]) <= tol) ++matched;
    }
  }
  CHECK(matched >= pt.periods.size() - 4);
}

TEST_CASE("unvoiced noise yields an empty period track") {
  Rng rng(5);
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(16000);
  for (double& s : clip.samples) s = 0.3 * rng.normal();
  PitchContour pc = pitch_track(clip);
  PeriodTrack pt = extract_periods(clip, pc);
  CHECK(pt.periods.size() < 10);  // essentially nothing chains up
}

TEST_CASE("harmonicity of known signals") {
  SUBCASE("pure tone is at least 30 dB") {
    AudioClip clip = sine(200.0, 2.0);
    PitchContour pc = pitch_track(clip);
    HarmonicityResult h = harmonicity(clip, pc);
    CHECK(h.hnr_db >= 30.0);
  }
  SUBCASE("tone plus equal-power noise sits at 0 dB") {
    AudioClip clip = sine(200.0, 2.0, 0.5);
    Rng rng(12);
    const double sigma = 0.5 / std::sqrt(2.0);  // sine rms == noise rms
    for (double& s : clip.samples) s += sigma * rng.normal();
    PitchContour pc = pitch_track(clip);
    REQUIRE(pc.voiced_count() > 50);
    HarmonicityResult h = harmonicity(clip, pc);
    CHECK(std::fabs(h.hnr_db - 0.0) <= 1.5);
  }
  SUBCASE("identities hold to 1e-12") {
    AudioClip clip = sine(150.0, 1.0);
    PitchContour pc = pitch_track(clip);
    HarmonicityResult h = harmonicity(clip, pc);
    const double r = h.autocorr_mean;
    CHECK(std::fabs(h.hnr_db - 10.0 * std::log10(r / (1.0 - r))) < 1e-12);
    CHECK(std::fabs(h.nhr - (1.0 - r) / r) < 1e-12);
  }
  SUBCASE("all-silence raises no-voiced-speech") {
    AudioClip clip;
    clip.sample_rate = 16000;
    clip.samples.assign(16000, 0.0);
    PitchContour pc = pitch_track(clip);
    CHECK_THROWS_AS(harmonicity(clip, pc), DataError);
  }
}

TEST_CASE("nuclei detection on constructed clips") {
  SUBCASE("five bursts give five nuclei") {
    SynthSpec spec;
    spec.f0_hz = 200.0;
    spec.segments.clear();
    for (int i = 0; i < 5; ++i) {
      spec.segments.push_back({SegKind::speech, 0.25});
      spec.segments.push_back({SegKind::pause, 0.3});
    }
    SynthVoice v = synth_voice(spec, 3);
    PitchContour pc = pitch_track(v.clip);
    IntensityContour ic = intensity_contour(v.clip);
    NucleusTrack nt = detect_nuclei(v.clip, ic, pc);
    CHECK(nt.nucleus_times.size() == 5);
  }
  SUBCASE("all silence is one pause") {
    AudioClip clip;
    clip.sample_rate = 16000;
    clip.samples.assign(32000, 0.0);
    PitchContour pc = pitch_track(clip);
    IntensityContour ic = intensity_contour(clip);
    NucleusTrack nt = detect_nuclei(clip, ic, pc);
    CHECK(nt.nucleus_times.empty());
    CHECK(nt.phonation_time == 0.0);
    REQUIRE(nt.pause_spans.size() == 1);
    CHECK(nt.pause_spans[0].begin == doctest::Approx(0.0));
    CHECK(nt.pause_spans[0].end == doctest::Approx(2.0));
  }
  SUBCASE("2 s speech + 2 s pause measures 2.0 s of pause") {
    SynthSpec spec;
    spec.f0_hz = 150.0;
    spec.segments = {{SegKind::speech, 2.0}, {SegKind::pause, 2.0}};
    SynthVoice v = synth_voice(spec, 9);
    PitchContour pc = pitch_track(v.clip);
    IntensityContour ic = intensity_contour(v.clip);
    NucleusTrack nt = detect_nuclei(v.clip, ic, pc);
    double pause_total = 0;
    for (const TimeSpan& p : nt.pause_spans) pause_total += p.length();
    CHECK(pause_total == doctest::Approx(2.0).epsilon(0.025));
    CHECK(nt.phonation_time == doctest::Approx(2.0).epsilon(0.025));
  }
  SUBCASE("appending silence never changes the nucleus count") {
    SynthSpec spec;
    spec.f0_hz = 180.0;
    spec.segments = {{SegKind::speech, 0.3}, {SegKind::pause, 0.4},
                     {SegKind::speech, 0.3}};
    SynthVoice v = synth_voice(spec, 13);
    PitchContour pc = pitch_track(v.clip);
    IntensityContour ic = intensity_contour(v.clip);
    const std::size_t base = detect_nuclei(v.clip, ic, pc).nucleus_times.size();

    AudioClip longer = v.clip;
    longer.samples.resize(longer.samples.size() + 16000, 0.0);
    PitchContour pc2 = pitch_track(longer);
    IntensityContour ic2 = intensity_contour(longer);
    CHECK(detect_nuclei(longer, ic2, pc2).nucleus_times.size() == base);
  }
}

TEST_CASE("serial and parallel pitch tracking are bit-identical") {
  SynthSpec spec;
  spec.f0_hz = 160.0;
  spec.jitter_target = 0.01;
  spec.noise_snr_db = 15.0;
  spec.segments = {{SegKind::speech, 1.5}};
  AudioClip clip = synth_voice(spec, 77).clip;

  PitchConfig serial_cfg;
  serial_cfg.parallel = false;
  PitchConfig parallel_cfg;
  parallel_cfg.parallel = true;
  PitchContour a = pitch_track(clip, serial_cfg);
  PitchContour b = pitch_track(clip, parallel_cfg);
  REQUIRE(a.voiced.size() == b.voiced.size());
  for (std::size_t k = 0; k < a.voiced.size(); ++k) {
    CHECK(a.voiced[k] == b.voiced[k]);
    CHECK(a.f0[k] == b.f0[k]);
    CHECK(a.strength[k] == b.strength[k]);
  }
}

TEST_CASE("too-short clips and bad bounds are rejected") {
  AudioClip clip = sine(200.0, 0.05);
  CHECK_THROWS_AS(pitch_track(clip), DataError);
  AudioClip ok = sine(200.0, 1.0);
  PitchConfig bad;
  bad.floor_hz = 700;
  CHECK_THROWS_AS(pitch_track(ok, bad), DataError);
}
