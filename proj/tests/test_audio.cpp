#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <vector>

#include "adspeech/audio.hpp"
#include "adspeech/error.hpp"
#include "adspeech/rng.hpp"

using namespace adspeech;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/adspeech_test_") + name;
}

// Hand-built WAV bytes, independent of write_wav.
void write_raw_wav(const std::string& path, int rate, int channels, int bits,
                   int format, const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](std::uint32_t v) {
    char b[4] = {char(v), char(v >> 8), char(v >> 16), char(v >> 24)};
    out.write(b, 4);
  };
  auto u16 = [&](std::uint16_t v) {
    char b[2] = {char(v), char(v >> 8)};
    out.write(b, 2);
  };
  out.write("RIFF", 4);
  u32(36 + payload.size());
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(channels * bits / 8);
  u16(bits);
  out.write("data", 4);
  u32(payload.size());
  out.write(reinterpret_cast<const char*>(payload.data()), payload.size());
}

}  // namespace

TEST_CASE("one second of 16-bit silence") {
  auto path = temp_path("silence.wav");
  std::vector<unsigned char> data(16000 * 2, 0);
  write_raw_wav(path, 16000, 1, 16, 1, data);
  AudioClip clip = load_wav(path);
  CHECK(clip.sample_rate == 16000);
  CHECK(clip.samples.size() == 16000);
  CHECK(clip.duration() == doctest::Approx(1.0));
  for (double s : clip.samples) CHECK(s == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("16-bit full-scale square wave scales to +-32767/32768") {
  auto path = temp_path("square.wav");
  std::vector<unsigned char> data;
  for (int i = 0; i < 64; ++i) {
    std::int16_t v = (i % 2 == 0) ? 32767 : -32767;
    data.push_back(static_cast<unsigned char>(v & 0xFF));
    data.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
  }
  write_raw_wav(path, 8000, 1, 16, 1, data);
  AudioClip clip = load_wav(path);
  REQUIRE(clip.samples.size() == 64);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double expect = (i % 2 == 0 ? 1.0 : -1.0) * 32767.0 / 32768.0;
    CHECK(clip.samples[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  std::remove(path.c_str());
}

TEST_CASE("stereo +0.5/-0.5 averages to zero") {
  auto path = temp_path("stereo.wav");
  std::vector<unsigned char> data;
  auto push16 = [&](std::int16_t v) {
    data.push_back(static_cast<unsigned char>(v & 0xFF));
    data.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
  };
  for (int i = 0; i < 100; ++i) {
    push16(16384);   // +0.5
    push16(-16384);  // -0.5
  }
  write_raw_wav(path, 16000, 2, 16, 1, data);
  AudioClip clip = load_wav(path);
  REQUIRE(clip.samples.size() == 100);
  for (double s : clip.samples) CHECK(s == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("8-bit and 24-bit integer and 32-bit float payloads") {
  auto path = temp_path("depths.wav");
  SUBCASE("8-bit unsigned midpoint is zero") {
    write_raw_wav(path, 8000, 1, 8, 1, {128, 255, 0});
    AudioClip clip = load_wav(path);
    CHECK(clip.samples[0] == 0.0);
    CHECK(clip.samples[1] == doctest::Approx(127.0 / 128.0));
    CHECK(clip.samples[2] == doctest::Approx(-1.0));
  }
  SUBCASE("24-bit full scale") {
    // 0x400000 = +0.5
    write_raw_wav(path, 8000, 1, 24, 1, {0x00, 0x00, 0x40});
    AudioClip clip = load_wav(path);
    CHECK(clip.samples[0] == doctest::Approx(0.5));
  }
  SUBCASE("32-bit float passthrough") {
    float v = 0.25f;
    unsigned char b[4];
    std::memcpy(b, &v, 4);
    write_raw_wav(path, 8000, 1, 32, 3, {b[0], b[1], b[2], b[3]});
    AudioClip clip = load_wav(path);
    CHECK(clip.samples[0] == doctest::Approx(0.25));
  }
  std::remove(path.c_str());
}

TEST_CASE("distinct errors for missing, malformed and unsupported files") {
  CHECK_THROWS_WITH_AS(load_wav("/tmp/adspeech_no_such_file.wav"),
                       doctest::Contains("not found"), DataError);

  auto bad = temp_path("bad.wav");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "this is not a wav file at all";
  }
  CHECK_THROWS_WITH_AS(load_wav(bad), doctest::Contains("malformed RIFF"), DataError);

  auto ulaw = temp_path("ulaw.wav");
  write_raw_wav(ulaw, 8000, 1, 8, 7, {0, 0, 0, 0});  // mu-law codec tag
  CHECK_THROWS_WITH_AS(load_wav(ulaw), doctest::Contains("unsupported codec"), DataError);

  std::remove(bad.c_str());
  std::remove(ulaw.c_str());
}

TEST_CASE("write then load round-trips within one 16-bit step") {
  auto path = temp_path("roundtrip.wav");
  Rng rng(42);
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(2048);
  for (double& s : clip.samples) s = rng.uniform(-1.0, 1.0);
  write_wav(path, clip);
  AudioClip back = load_wav(path);
  REQUIRE(back.samples.size() == clip.samples.size());
  CHECK(back.sample_rate == 16000);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    CHECK(std::fabs(back.samples[i] - clip.samples[i]) <= 1.0 / 32768.0);
  }
  std::remove(path.c_str());
}
