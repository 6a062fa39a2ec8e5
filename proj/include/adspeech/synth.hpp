#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "adspeech/audio.hpp"

namespace adspeech {

enum class SegKind { speech, pause };

struct Segment {
  SegKind kind;
  double duration_s;
};

struct TimeSpan {
  double begin, end;
  double length() const { return end - begin; }
};

/// Recipe for a synthetic voice clip with known ground truth.
struct SynthSpec {
  double f0_hz = 200.0;
  double jitter_target = 0.0;   // local jitter (ratio), realized exactly
  double shimmer_target = 0.0;  // local shimmer (ratio), realized exactly
  std::optional<double> noise_snr_db;  // white noise over speech segments
  std::vector<Segment> segments = {{SegKind::speech, 2.0}};
  int sample_rate = 16000;
};

/// Audio plus the planted ground truth the DSP oracles check against.
struct SynthVoice {
  AudioClip clip;
  std::vector<double> pulse_times;  // seconds, concatenated over segments
  std::vector<double> periods;      // within-segment consecutive diffs
  std::vector<double> amplitudes;   // per period, unit scale
  // First pulse index of each speech segment, plus a final sentinel; period
  // i belongs to a segment iff i and i+1 are pulses of the same segment.
  std::vector<std::size_t> segment_pulse_offsets;
  std::vector<TimeSpan> speech_spans;
  std::vector<TimeSpan> pause_spans;
};

/// Renders a glottal-like pulse train per spec. Each pulse is a decaying
/// cosine burst spanning 40% of its period; pause segments are exact
/// silence. Deterministic: same spec + seed give a bit-identical clip.
SynthVoice synth_voice(const SynthSpec& spec, std::uint64_t seed);

/// Local jitter of a period list: mean|T[i+1]-T[i]| / mean(T). The
/// independent recomputation used by oracle tests.
double local_jitter(const std::vector<double>& periods);

/// Local shimmer of an amplitude list: mean|A[i+1]-A[i]| / mean(A).
double local_shimmer(const std::vector<double>& amplitudes);

}  // namespace adspeech
