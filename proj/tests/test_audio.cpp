#include <doctest.h>

#include <fstream>

#include "emoclap/audio.hpp"
#include "emoclap/errors.hpp"
#include "helpers.hpp"

using namespace emoclap;

TEST_CASE("wav round trip preserves samples to quantization") {
  test::TempDir dir("wav");
  AudioClip clip = test::make_sine(220.0, 0.25);
  save_wav(clip, dir.path() / "tone.wav");
  AudioClip loaded = load_wav(dir.path() / "tone.wav");

  CHECK(loaded.id == "tone");
  CHECK(loaded.sample_rate == clip.sample_rate);
  REQUIRE(loaded.samples.size() == clip.samples.size());
  double max_err = 0.0;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    max_err = std::max(max_err, std::abs(loaded.samples[i] - clip.samples[i]));
  }
  CHECK(max_err <= 0.5 / 32768.0 + 1e-12);
}

TEST_CASE("duration follows sample count") {
  test::TempDir dir("wavdur");
  AudioClip clip = test::make_constant(0.1, 1.0, 16000);
  REQUIRE(clip.samples.size() == 16000);
  save_wav(clip, dir.path() / "one_second.wav");
  AudioClip loaded = load_wav(dir.path() / "one_second.wav");
  CHECK(loaded.duration_s() == doctest::Approx(1.0));
}

TEST_CASE("pcm scaling divides by 32768") {
  test::TempDir dir("wavscale");
  // craft a file holding the single sample 32767
  std::string bytes;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](std::uint16_t v) {
    bytes.push_back(static_cast<char>(v & 0xff));
    bytes.push_back(static_cast<char>((v >> 8) & 0xff));
  };
  bytes += "RIFF";
  u32(36 + 2);
  bytes += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(1);
  u32(16000);
  u32(32000);
  u16(2);
  u16(16);
  bytes += "data";
  u32(2);
  u16(32767);
  std::ofstream(dir.path() / "max.wav", std::ios::binary) << bytes;

  AudioClip clip = load_wav(dir.path() / "max.wav");
  REQUIRE(clip.samples.size() == 1);
  CHECK(clip.samples[0] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-12));
}

TEST_CASE("stereo wav is rejected") {
  test::TempDir dir("wavstereo");
  std::string bytes;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](std::uint16_t v) {
    bytes.push_back(static_cast<char>(v & 0xff));
    bytes.push_back(static_cast<char>((v >> 8) & 0xff));
  };
  bytes += "RIFF";
  u32(36 + 4);
  bytes += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(2);  // stereo
  u32(16000);
  u32(64000);
  u16(4);
  u16(16);
  bytes += "data";
  u32(4);
  u16(0);
  u16(0);
  std::ofstream(dir.path() / "stereo.wav", std::ios::binary) << bytes;
  CHECK_THROWS_AS(load_wav(dir.path() / "stereo.wav"), UnsupportedFormat);
}

TEST_CASE("malformed and missing files raise") {
  test::TempDir dir("wavbad");
  std::ofstream(dir.path() / "junk.wav", std::ios::binary) << "this is not a wav";
  CHECK_THROWS_AS(load_wav(dir.path() / "junk.wav"), MalformedWav);
  CHECK_THROWS_AS(load_wav(dir.path() / "absent.wav"), IoError);
}
