#include "adspeech/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adspeech/error.hpp"
#include "adspeech/rng.hpp"

namespace adspeech {

namespace {

constexpr double kBurstFraction = 0.4;  // burst length as share of period
constexpr double kBurstDecay = 5.0;     // envelope reaches e^-5 at burst end

// Scales centered deviations so the realized local perturbation measure
// (mean|d[i+1]-d[i]| over within-segment pairs, against unit mean) equals
// `target`. Returns false when there are no usable pairs.
bool scale_deviations(std::vector<double>& dev,
                      const std::vector<std::size_t>& offsets, double target) {
  double mean = std::accumulate(dev.begin(), dev.end(), 0.0) /
                static_cast<double>(dev.size());
  for (double& d : dev) d -= mean;
  double sum_abs_delta = 0.0;
  std::size_t pairs = 0;
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    for (std::size_t i = offsets[s]; i + 1 < offsets[s + 1]; ++i) {
      sum_abs_delta += std::fabs(dev[i + 1] - dev[i]);
      ++pairs;
    }
  }
  if (pairs == 0 || sum_abs_delta == 0.0) {
    std::fill(dev.begin(), dev.end(), 0.0);
    return target == 0.0;
  }
  double scale = target / (sum_abs_delta / static_cast<double>(pairs));
  for (double& d : dev) d *= scale;
  return true;
}

}  // namespace

double local_jitter(const std::vector<double>& periods) {
  if (periods.size() < 2) return 0.0;
  double mean = std::accumulate(periods.begin(), periods.end(), 0.0) /
                static_cast<double>(periods.size());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < periods.size(); ++i) {
    acc += std::fabs(periods[i + 1] - periods[i]);
  }
  return acc / static_cast<double>(periods.size() - 1) / mean;
}

double local_shimmer(const std::vector<double>& amplitudes) {
  return local_jitter(amplitudes);  // same functional form
}

SynthVoice synth_voice(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.f0_hz <= 0 || spec.sample_rate <= 0 || spec.segments.empty()) {
    throw DataError("synth_voice: invalid spec");
  }
  if (spec.jitter_target < 0 || spec.jitter_target > 0.2 ||
      spec.shimmer_target < 0 || spec.shimmer_target > 0.2) {
    throw DataError("synth_voice: jitter/shimmer targets must be in [0, 0.2]");
  }
  const double t0 = 1.0 / spec.f0_hz;
  for (const Segment& seg : spec.segments) {
    if (seg.duration_s <= 0) throw DataError("synth_voice: segment duration must be > 0");
    if (seg.kind == SegKind::speech && seg.duration_s < t0) {
      throw DataError("synth_voice: f0 period longer than a speech segment");
    }
  }

  const double fs = spec.sample_rate;
  const double dt = 1.0 / fs;
  double total = 0.0;
  for (const Segment& seg : spec.segments) total += seg.duration_s;
  const std::size_t n_samples = static_cast<std::size_t>(std::llround(total * fs));

  SynthVoice out;
  out.clip.sample_rate = spec.sample_rate;
  out.clip.samples.assign(n_samples, 0.0);

  // Segment spans and per-segment period counts. The margin keeps the last
  // burst inside the segment even after jitter perturbation.
  double cursor = 0.0;
  std::vector<TimeSpan> speech;
  std::vector<std::size_t> periods_per_seg;
  for (const Segment& seg : spec.segments) {
    TimeSpan span{cursor, cursor + seg.duration_s};
    cursor = span.end;
    if (seg.kind == SegKind::pause) {
      out.pause_spans.push_back(span);
      continue;
    }
    out.speech_spans.push_back(span);
    speech.push_back(span);
    double est = seg.duration_s / t0;
    double margin = t0 * (kBurstFraction + 4.0 * spec.jitter_target * std::sqrt(est));
    std::size_t n_periods = static_cast<std::size_t>(
        std::floor((seg.duration_s - margin) / t0));
    if (n_periods < 1) n_periods = 1;
    periods_per_seg.push_back(n_periods);
  }

  std::size_t total_periods = std::accumulate(periods_per_seg.begin(), periods_per_seg.end(), std::size_t{0});

  // Per-period deviation draws; centering plus rescaling makes the realized
  // local jitter/shimmer equal the targets against a mean of exactly t0 / 1.
  Rng rng(seed);
  auto clipped_normal = [&rng]() {
    double v = rng.normal();
    return v < -4.0 ? -4.0 : (v > 4.0 ? 4.0 : v);
  };
  std::vector<double> jdev(total_periods), adev(total_periods);
  for (double& d : jdev) d = clipped_normal();
  for (double& d : adev) d = clipped_normal();

  std::vector<std::size_t> offsets(periods_per_seg.size() + 1, 0);
  for (std::size_t s = 0; s < periods_per_seg.size(); ++s) {
    offsets[s + 1] = offsets[s] + periods_per_seg[s];
  }
  scale_deviations(jdev, offsets, spec.jitter_target);
  scale_deviations(adev, offsets, spec.shimmer_target);

  out.segment_pulse_offsets.assign(periods_per_seg.size() + 1, 0);

  // Render each speech segment: pulses at cumulative perturbed periods,
  // each a damped sinusoid burst placed with sub-sample alignment.
  const double carrier = std::min(10.0 * spec.f0_hz, 0.35 * fs);
  for (std::size_t s = 0; s < speech.size(); ++s) {
    const TimeSpan span = speech[s];
    out.segment_pulse_offsets[s] = out.pulse_times.size();
    double t = span.begin;
    const std::size_t n_periods = periods_per_seg[s];
    for (std::size_t i = 0; i <= n_periods; ++i) {
      out.pulse_times.push_back(t);
      double period = t0 * (1.0 + jdev[offsets[s] + std::min(i, n_periods - 1)]);
      double amp = 1.0 + adev[offsets[s] + std::min(i, n_periods - 1)];
      double burst_len = kBurstFraction * period;
      std::size_t first = static_cast<std::size_t>(std::ceil(t * fs));
      std::size_t seg_end = std::min(
          n_samples, static_cast<std::size_t>(std::ceil(span.end * fs)));
      std::size_t last = std::min(
          seg_end, static_cast<std::size_t>(std::ceil((t + burst_len) * fs)));
      // smooth attack and release keep the burst spectrum inside the band,
      // so the sampled train stays coherent at its own period
      const double attack = 0.5 / carrier;
      const double release = 0.1 * burst_len;
      for (std::size_t n = first; n < last; ++n) {
        double u = n * dt - t;
        double env = std::exp(-kBurstDecay * u / burst_len);
        if (u < attack) {
          double a = std::sin(0.5 * 3.14159265358979323846 * u / attack);
          env *= a * a;
        }
        if (u > burst_len - release) {
          double rle = std::cos(0.5 * 3.14159265358979323846 *
                                (u - (burst_len - release)) / release);
          env *= rle * rle;
        }
        out.clip.samples[n] += amp * std::sin(2.0 * 3.14159265358979323846 * carrier * u) * env;
      }
      if (i < n_periods) {
        out.periods.push_back(period);
        out.amplitudes.push_back(amp);
        t += period;
      }
    }
  }
  out.segment_pulse_offsets.back() = out.pulse_times.size();

  // White noise over speech samples only, scaled to the requested SNR
  // against the rendered speech power; pauses stay exact silence.
  if (spec.noise_snr_db) {
    for (const TimeSpan& span : speech) {
      std::size_t a = static_cast<std::size_t>(std::llround(span.begin * fs));
      std::size_t b = std::min(n_samples, static_cast<std::size_t>(std::llround(span.end * fs)));
      if (b <= a) continue;
      double power = 0.0;
      for (std::size_t n = a; n < b; ++n) power += out.clip.samples[n] * out.clip.samples[n];
      power /= static_cast<double>(b - a);
      double sigma = std::sqrt(power / std::pow(10.0, *spec.noise_snr_db / 10.0));
      for (std::size_t n = a; n < b; ++n) out.clip.samples[n] += sigma * rng.normal();
    }
  }

  // Keep samples inside [-1, 1]; uniform rescaling preserves every planted
  // ratio, so the manifest amplitudes are rescaled alongside.
  double peak = 0.0;
  for (double v : out.clip.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 0.99) {
    double g = 0.99 / peak;
    for (double& v : out.clip.samples) v *= g;
    for (double& a : out.amplitudes) a *= g;
  }

  return out;
}

}  // namespace adspeech
