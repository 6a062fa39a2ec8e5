#include "adspeech/audio.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "adspeech/error.hpp"

namespace adspeech {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
  return std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8;
}

float read_f32(const unsigned char* p) {
  std::uint32_t bits = read_u32(p);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("audio file not found: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());

  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw DataError("malformed RIFF header: " + path);
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char* chunk = buf.data() + pos;
    std::uint32_t size = read_u32(chunk + 4);
    if (pos + 8 + size > buf.size()) {
      throw DataError("malformed RIFF header: truncated chunk in " + path);
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw DataError("malformed RIFF header: short fmt chunk in " + path);
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    throw DataError("malformed RIFF header: missing fmt or data chunk in " + path);
  }
  if (rate == 0 || channels == 0) {
    throw DataError("malformed RIFF header: zero rate or channel count in " + path);
  }

  const bool pcm_int = format == 1 && (bits == 8 || bits == 16 || bits == 24);
  const bool pcm_float = format == 3 && bits == 32;
  if (!pcm_int && !pcm_float) {
    throw DataError("unsupported codec (need integer or 32-bit float PCM): " +
                    path);
  }

  const std::uint32_t bytes_per_sample = bits / 8;
  const std::uint32_t frame_size = bytes_per_sample * channels;
  const std::uint32_t frames = data_size / frame_size;
  if (frames == 0) throw DataError("audio file contains no samples: " + path);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (std::uint32_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::uint32_t ch = 0; ch < channels; ++ch) {
      const unsigned char* s = data + f * frame_size + ch * bytes_per_sample;
      double v;
      if (pcm_float) {
        v = read_f32(s);
      } else if (bits == 8) {
        v = (int(s[0]) - 128) / 128.0;
      } else if (bits == 16) {
        v = std::int16_t(read_u16(s)) / 32768.0;
      } else {  // 24
        std::int32_t raw = std::int32_t(s[0]) | std::int32_t(s[1]) << 8 |
                           std::int32_t(s[2]) << 16;
        if (raw & 0x800000) raw |= ~0xFFFFFF;
        v = raw / 8388608.0;
      }
      acc += v;
    }
    double mixed = acc / channels;
    clip.samples[f] = mixed < -1.0 ? -1.0 : (mixed > 1.0 ? 1.0 : mixed);
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  if (clip.samples.empty() || clip.sample_rate <= 0) {
    throw InternalError("write_wav: empty clip or invalid rate");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write audio file: " + path);

  const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_size = n * 2;
  const std::uint32_t rate = static_cast<std::uint32_t>(clip.sample_rate);

  auto put_u32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<char*>(b), 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // integer PCM
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(rate * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_size);

  for (double s : clip.samples) {
    double scaled = s * 32768.0;
    long v = std::lround(scaled);
    if (v > 32767) v = 32767;
    if (v < -32768) v = -32768;
    put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  if (!out) throw DataError("error while writing audio file: " + path);
}

}  // namespace adspeech
