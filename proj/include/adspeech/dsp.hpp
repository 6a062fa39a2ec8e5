#pragma once

#include <cstdint>
#include <vector>

#include "adspeech/audio.hpp"
#include "adspeech/synth.hpp"  // TimeSpan

namespace adspeech {

struct PitchConfig {
  double floor_hz = 75.0;
  double ceiling_hz = 600.0;
  double step_s = 0.0033;
  double window_s = 0.080;  // Gaussian analysis window
  double voicing_threshold = 0.45;
  // Candidate bias toward higher F0 (per octave below the ceiling) and the
  // dynamic-programming transition costs.
  double octave_cost = 0.01;
  double octave_jump_cost = 0.35;
  double voiced_unvoiced_cost = 0.14;
  int max_candidates = 4;
  bool parallel = true;
};

struct PitchContour {
  std::vector<double> frame_times;     // uniform step
  std::vector<double> f0;              // Hz, meaningful where voiced
  std::vector<std::uint8_t> voiced;    // explicit unvoiced marker
  std::vector<double> strength;        // NCC peak at the chosen lag
  double floor_hz = 0, ceiling_hz = 0, step_s = 0;

  std::size_t voiced_count() const {
    std::size_t n = 0;
    for (auto v : voiced) n += v;
    return n;
  }
};

struct IntensityConfig {
  double window_s = 0.032;
  double step_s = 0.0033;
  bool parallel = true;
};

struct IntensityContour {
  std::vector<double> frame_times;
  std::vector<double> intensity_db;  // exact-zero windows floor at 0 dB
};

struct PeriodTrack {
  std::vector<double> pulse_times;  // glottal pulse epochs, seconds
  std::vector<double> periods;      // consecutive epoch differences
  std::vector<double> amplitudes;   // peak |x| per period
};

struct HarmonicityResult {
  double autocorr_mean = 0;  // mean voiced-frame NCC, in (0, 1)
  double hnr_db = 0;
  double nhr = 0;
};

struct NucleusConfig {
  double silence_threshold_db = 25.0;  // below max intensity
  double dip_db = 2.0;
  double min_pause_s = 0.100;
  bool parallel = true;
};

struct NucleusTrack {
  std::vector<double> nucleus_times;
  double phonation_time = 0;  // total duration of speech spans
  std::vector<TimeSpan> pause_spans;
};

/// Normalized cross-correlation pitch tracker: per frame, Gaussian-weighted
/// NCC over the candidate lag range, then a least-cost candidate path with
/// octave, voicing and jump costs. Frames whose chosen candidate falls
/// below the voicing threshold are unvoiced.
PitchContour pitch_track(const AudioClip& clip, const PitchConfig& cfg = {});

/// Frame intensity 10*log10(mean(s^2)/p0^2) with p0 = 2e-5 Pa; exact-zero
/// windows map to a 0 dB floor.
IntensityContour intensity_contour(const AudioClip& clip,
                                   const IntensityConfig& cfg = {});

/// Pulse epochs by peak chaining inside voiced regions with sub-sample
/// parabolic refinement; regions with fewer than 3 pulses are discarded.
PeriodTrack extract_periods(const AudioClip& clip, const PitchContour& pc);

/// Aggregates the per-frame NCC at the pitch lag into the autocorrelation
/// mean, HNR and NHR. Raises DataError when no frame is voiced.
HarmonicityResult harmonicity(const AudioClip& clip, const PitchContour& pc);

/// Syllable nuclei: intensity peaks above the silence threshold, preceded
/// by a dip, on a voiced pitch frame. Pauses shorter than min_pause_s merge
/// into the surrounding speech.
NucleusTrack detect_nuclei(const AudioClip& clip, const IntensityContour& ic,
                           const PitchContour& pc, const NucleusConfig& cfg = {});

}  // namespace adspeech
