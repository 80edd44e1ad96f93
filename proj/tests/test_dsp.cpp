#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "emoclap/dsp.hpp"
#include "emoclap/errors.hpp"
#include "helpers.hpp"

using namespace emoclap;

namespace {

int count_voiced(const FrameSeries& f) {
  int n = 0;
  for (double v : f.values) n += v > 0.0 ? 1 : 0;
  return n;
}

double mean_voiced(const FrameSeries& f) {
  double sum = 0.0;
  int n = 0;
  for (double v : f.values) {
    if (v > 0.0) {
      sum += v;
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

}  // namespace

TEST_CASE("intensity of a constant p_ref signal is 0 dB") {
  AudioClip clip = test::make_constant(2e-5, 0.5);
  FrameSeries f = intensity_contour(clip, 0.040, 0.010);
  REQUIRE(!f.values.empty());
  for (double v : f.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("all-zero frames hit the dB floor") {
  AudioClip clip = test::make_constant(0.0, 0.5);
  FrameSeries f = intensity_contour(clip, 0.040, 0.010);
  for (double v : f.values) CHECK(v == kDbFloor);
}

TEST_CASE("full-scale square wave measures ~93.98 dB") {
  AudioClip clip;
  clip.id = "square";
  clip.sample_rate = 16000;
  clip.samples.resize(8000);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = (i / 40) % 2 == 0 ? 1.0 : -1.0;  // 200 Hz square
  }
  // RMS of a unit square wave is exactly 1, so 20*log10(1/2e-5)
  const double expected = 20.0 * std::log10(1.0 / 2e-5);
  CHECK(expected == doctest::Approx(93.9794).epsilon(1e-4));
  FrameSeries f = intensity_contour(clip, 0.040, 0.010);
  for (double v : f.values) CHECK(v == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("bad frame configs are rejected") {
  AudioClip clip = test::make_constant(0.1, 0.2);
  CHECK_THROWS_AS(intensity_contour(clip, 0.040, 0.0), BadFrameConfig);
  CHECK_THROWS_AS(intensity_contour(clip, 0.010, 0.020), BadFrameConfig);
  CHECK_THROWS_AS(intensity_contour(clip, 0.500, 0.010), BadFrameConfig);
}

TEST_CASE("pitch of a 220 Hz sine lands within 2 Hz") {
  AudioClip clip = test::make_sine(220.0, 1.0);
  FrameSeries f = pitch_contour(clip, PitchConfig{});
  REQUIRE(count_voiced(f) > 0);
  for (double v : f.values) {
    if (v > 0.0) CHECK(std::abs(v - 220.0) < 2.0);
  }
}

TEST_CASE("pitch estimates stay within 3% across the speech band") {
  for (double freq : {100.0, 150.0, 220.0, 300.0}) {
    AudioClip clip = test::make_sine(freq, 1.0);
    FrameSeries f = pitch_contour(clip, PitchConfig{});
    REQUIRE(count_voiced(f) > 0);
    const double mean = mean_voiced(f);
    CHECK(std::abs(mean - freq) / freq < 0.03);
  }
}

TEST_CASE("white noise is mostly unvoiced") {
  AudioClip clip = test::make_noise(1.0, 42);
  FrameSeries f = pitch_contour(clip, PitchConfig{});
  const int unvoiced = static_cast<int>(f.values.size()) - count_voiced(f);
  CHECK(unvoiced >= static_cast<int>(0.9 * f.values.size()));
}

TEST_CASE("silence has no pitch") {
  AudioClip clip = test::make_constant(0.0, 0.5);
  FrameSeries f = pitch_contour(clip, PitchConfig{});
  for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("narrow or invalid pitch bands are rejected") {
  AudioClip clip = test::make_sine(220.0, 0.5);
  PitchConfig bad;
  bad.f_min = 500.0;
  bad.f_max = 400.0;
  CHECK_THROWS_AS(pitch_contour(clip, bad), BandTooNarrow);
  bad.f_min = 60.0;
  bad.f_max = 9000.0;  // above Nyquist at 16 kHz
  CHECK_THROWS_AS(pitch_contour(clip, bad), BandTooNarrow);
}

TEST_CASE("amplitude scaling shifts intensity by 20*log10(a) and not pitch") {
  AudioClip clip = test::make_sine(220.0, 1.0, 16000, 0.2);
  AudioClip scaled = clip;
  for (double& s : scaled.samples) s *= 0.5;

  FrameSeries a = intensity_contour(clip, 0.040, 0.010);
  FrameSeries b = intensity_contour(scaled, 0.040, 0.010);
  const double shift = 20.0 * std::log10(0.5);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(std::abs(b.values[i] - a.values[i] - shift) < 1e-6);
  }

  // power-of-two scaling is exact in binary floating point, so the
  // normalized difference function and the voiced estimates are bit-equal
  FrameSeries pa = pitch_contour(clip, PitchConfig{});
  FrameSeries pb = pitch_contour(scaled, PitchConfig{});
  REQUIRE(pa.values.size() == pb.values.size());
  for (std::size_t i = 0; i < pa.values.size(); ++i) CHECK(pa.values[i] == pb.values[i]);
}

TEST_CASE("syllable nuclei: four bursts with deep dips count as four") {
  FrameSeries contour;
  contour.hop_s = 0.01;
  contour.start_s = 0.02;
  for (int b = 0; b < 4; ++b) {
    for (int i = 0; i < 5; ++i) contour.values.push_back(-40.0);
    for (int i = 0; i < 5; ++i) contour.values.push_back(i == 2 ? -5.0 : -6.0);
  }
  for (int i = 0; i < 5; ++i) contour.values.push_back(-40.0);

  NucleiResult r = detect_syllable_nuclei(contour, NucleiConfig{});
  CHECK(r.count == 4);
  CHECK(r.nuclei_times.size() == 4);
  // 4 bursts x 5 frames above threshold (-5 - 25 = -30): the -40 valleys stay below
  CHECK(r.phonation_s == doctest::Approx(0.01 * 20).epsilon(1e-12));
}

TEST_CASE("syllable nuclei: shallow dips merge peaks") {
  FrameSeries contour;
  contour.hop_s = 0.01;
  // two peaks separated by a 1 dB dip (below the 2 dB minimum)
  contour.values = {-20.0, -10.0, -11.0, -10.0, -20.0};
  NucleiResult r = detect_syllable_nuclei(contour, NucleiConfig{});
  CHECK(r.count == 1);
}

TEST_CASE("syllable nuclei: flat contour counts at most one") {
  FrameSeries contour;
  contour.hop_s = 0.01;
  contour.values.assign(50, -12.0);
  NucleiResult r = detect_syllable_nuclei(contour, NucleiConfig{});
  CHECK(r.count <= 1);
  CHECK(r.phonation_s > 0.0);
}

TEST_CASE("syllable nuclei: floor-level contour is silence") {
  FrameSeries contour;
  contour.hop_s = 0.01;
  contour.values.assign(50, kDbFloor);
  NucleiResult r = detect_syllable_nuclei(contour, NucleiConfig{});
  CHECK(r.count == 0);
  CHECK(r.phonation_s == 0.0);
}

TEST_CASE("non-degenerate contours always have phonation") {
  FrameSeries contour;
  contour.hop_s = 0.01;
  contour.values = {-80.0, -70.0, -90.0};
  NucleiResult r = detect_syllable_nuclei(contour, NucleiConfig{});
  CHECK(r.phonation_s > 0.0);
}

TEST_CASE("log mel of silence is log(1e-10) everywhere") {
  AudioClip clip = test::make_constant(0.0, 0.5);
  MelFeatures mel = log_mel(clip, MelConfig{});
  const double expected = std::log(1e-10);
  for (double v : mel.values) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log mel frame count follows the drop-incomplete rule") {
  AudioClip clip = test::make_constant(0.01, 1.0, 16000);
  REQUIRE(clip.samples.size() == 16000);
  MelFeatures mel = log_mel(clip, MelConfig{});
  // brute-force frame count: slide until a full window no longer fits
  int expected = 0;
  for (std::size_t start = 0; start + 512 <= clip.samples.size(); start += 256) ++expected;
  CHECK(expected == 61);
  CHECK(mel.n_frames == expected);
}

TEST_CASE("a tone at a mel band center dominates that band") {
  // band centers for 40 mels over 0..8000 Hz, HTK scale
  auto mel_of = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto hz_of = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const int band = 12;
  const double center = hz_of(mel_of(8000.0) * (band + 1) / 41.0);

  AudioClip clip = test::make_sine(center, 0.5);
  MelFeatures mel = log_mel(clip, MelConfig{});
  for (int f = 0; f < mel.n_frames; ++f) {
    for (int m = 0; m < mel.n_mels; ++m) {
      if (m != band) CHECK(mel.at(band, f) > mel.at(m, f));
    }
  }
}

TEST_CASE("log mel rejects bad configs") {
  AudioClip clip = test::make_constant(0.1, 0.5);
  MelConfig bad;
  bad.n_fft = 500;  // not a power of two
  CHECK_THROWS_AS(log_mel(clip, bad), BadFrameConfig);
  bad = MelConfig{};
  bad.f_max = 9000.0;  // above Nyquist
  CHECK_THROWS_AS(log_mel(clip, bad), BadFrameConfig);
}

TEST_CASE("extract_profile on a synthetic burst clip recovers the ground truth") {
  // 220 Hz carrier, 4 bursts over 2 s, half the time phonating
  AudioClip clip;
  clip.id = "bursts";
  clip.sample_rate = 16000;
  clip.samples.assign(32000, 0.0);
  for (int b = 0; b < 4; ++b) {
    const int start = b * 8000 + 2000;
    for (int i = start; i < start + 4000; ++i) {
      clip.samples[i] = 0.3 * std::sin(2.0 * std::numbers::pi * 220.0 * i / 16000.0);
    }
  }

  AcousticProfile p = extract_profile(clip, ProfileConfig{});
  CHECK(p.clip_id == "bursts");
  CHECK(p.syllable_count == 4);
  CHECK(p.duration_s == doctest::Approx(2.0));
  CHECK(p.speech_rate == doctest::Approx(2.0).epsilon(0.05));
  CHECK(p.articulation_rate == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::abs(p.pitch_hz - 220.0) / 220.0 < 0.03);
  CHECK(p.phonation_s == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("extract_profile of silence is all zeros") {
  AudioClip clip = test::make_constant(0.0, 1.0);
  clip.id = "silence";
  AcousticProfile p = extract_profile(clip, ProfileConfig{});
  CHECK(p.pitch_hz == 0.0);
  CHECK(p.syllable_count == 0);
  CHECK(p.speech_rate == 0.0);
  CHECK(p.articulation_rate == 0.0);
  CHECK(p.phonation_s == 0.0);
}

TEST_CASE("extract_profile is deterministic and rate identities hold") {
  AudioClip clip = test::make_sine(150.0, 1.3);
  AcousticProfile a = extract_profile(clip, ProfileConfig{});
  AcousticProfile b = extract_profile(clip, ProfileConfig{});
  CHECK(a == b);

  CHECK(std::abs(a.speech_rate * a.duration_s - a.syllable_count) <=
        1e-9 * std::max(1.0, static_cast<double>(a.syllable_count)));
  if (a.phonation_s > 0.0) {
    CHECK(std::abs(a.articulation_rate * a.phonation_s - a.syllable_count) <=
          1e-9 * std::max(1.0, static_cast<double>(a.syllable_count)));
  }
  if (a.syllable_count > 0) CHECK(a.articulation_rate >= a.speech_rate);
}
