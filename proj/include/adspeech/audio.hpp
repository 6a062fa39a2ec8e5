#pragma once

#include <string>
#include <vector>

namespace adspeech {

/// Mono sample buffer. Samples are real amplitudes in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;  // Hz

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

/// Reads a RIFF PCM WAV file (8/16/24-bit integer or 32-bit float).
/// Multichannel input is mixed down by channel averaging; integer samples
/// are scaled to [-1, 1]. Missing files, malformed RIFF structure and
/// unsupported codecs are reported as distinct DataErrors.
AudioClip load_wav(const std::string& path);

/// Writes a mono 16-bit PCM WAV. load_wav(write_wav(clip)) reproduces the
/// samples within one 16-bit quantization step.
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace adspeech
