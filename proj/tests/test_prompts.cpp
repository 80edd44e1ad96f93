#include <doctest.h>

#include "emoclap/errors.hpp"
#include "emoclap/prompts.hpp"
#include "emoclap/util.hpp"

using namespace emoclap;

namespace {

AcousticProfile voiced_profile() {
  AcousticProfile p;
  p.clip_id = "clip0";
  p.pitch_hz = 220.0;
  p.intensity_db = 72.0;
  p.speech_rate = 2.0;
  p.articulation_rate = 4.0;
  p.syllable_count = 4;
  p.duration_s = 2.0;
  p.phonation_s = 1.0;
  return p;
}

}  // namespace

TEST_CASE("four-bin pitch uses the 132.5 / 180 / 210 Hz cutoffs") {
  BinRules rules;
  CHECK(bin_pitch(100.0, rules) == "low male pitch");
  CHECK(bin_pitch(150.0, rules) == "high male pitch");
  CHECK(bin_pitch(200.0, rules) == "low female pitch");
  CHECK(bin_pitch(250.0, rules) == "high female pitch");
  // ties go to the upper bin
  CHECK(bin_pitch(132.5, rules) == "high male pitch");
  CHECK(bin_pitch(180.0, rules) == "low female pitch");
  CHECK(bin_pitch(210.0, rules) == "high female pitch");
}

TEST_CASE("two-bin pitch cuts at 170 Hz") {
  BinRules rules;
  rules.pitch_mode = PitchMode::TwoBin;
  CHECK(bin_pitch(169.9, rules) == "low pitch");
  CHECK(bin_pitch(170.0, rules) == "high pitch");
  CHECK(bin_pitch(300.0, rules) == "high pitch");
}

TEST_CASE("unvoiced pitch cannot be binned") {
  CHECK_THROWS_AS(bin_pitch(0.0, BinRules{}), UnvoicedClip);
}

TEST_CASE("intensity cuts at 60 dB, ties high") {
  BinRules rules;
  CHECK(bin_intensity(45.0, rules) == "low intensity");
  CHECK(bin_intensity(72.0, rules) == "high intensity");
  CHECK(bin_intensity(60.0, rules) == "high intensity");
}

TEST_CASE("speech rate cuts at 3.12 syllables/sec, ties high") {
  BinRules rules;
  CHECK(bin_speech_rate(2.0, rules) == "low speech rate");
  CHECK(bin_speech_rate(5.0, rules) == "high speech rate");
  CHECK(bin_speech_rate(3.12, rules) == "high speech rate");
}

TEST_CASE("articulation rate cuts at 4.0 syllables/sec, ties high") {
  BinRules rules;
  CHECK(bin_articulation_rate(3.5, rules) == "low articulation rate");
  CHECK(bin_articulation_rate(4.5, rules) == "high articulation rate");
  CHECK(bin_articulation_rate(4.0, rules) == "high articulation rate");
}

TEST_CASE("binning is a monotone step function") {
  BinRules rules;
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double x1 = rng.uniform(30.0, 90.0);
    const double x2 = rng.uniform(30.0, 90.0);
    const bool hi1 = bin_intensity(x1, rules) == "high intensity";
    const bool hi2 = bin_intensity(x2, rules) == "high intensity";
    if (!hi1 && hi2) CHECK(x1 < x2);
    const double r1 = rng.uniform(0.0, 8.0);
    const double r2 = rng.uniform(0.0, 8.0);
    if (bin_speech_rate(r1, rules) == "low speech rate" &&
        bin_speech_rate(r2, rules) == "high speech rate") {
      CHECK(r1 < r2);
    }
  }
}

TEST_CASE("render follows the table templates") {
  CHECK(render_prompt(PromptFamily::Pitch, "high female pitch", "anger") ==
        "high female pitch anger");
  CHECK(render_prompt(PromptFamily::ClassLabel, std::nullopt, "sad") == "sad");
  CHECK_THROWS_AS(render_prompt(PromptFamily::Intensity, std::nullopt, "anger"), MissingBin);
  CHECK_THROWS_AS(render_prompt(PromptFamily::ClassLabel, std::nullopt, ""), InvalidEmotion);
  CHECK_THROWS_AS(render_prompt(PromptFamily::ClassLabel, std::nullopt, "Anger"), InvalidEmotion);
}

TEST_CASE("every rendered prompt parses back to its parts") {
  BinRules four;
  BinRules two;
  two.pitch_mode = PitchMode::TwoBin;
  const std::vector<std::string> emotions = {"anger", "happiness", "sad", "neutral"};
  std::vector<std::pair<PromptFamily, std::string>> bins = {
      {PromptFamily::Pitch, "low male pitch"},
      {PromptFamily::Pitch, "high male pitch"},
      {PromptFamily::Pitch, "low female pitch"},
      {PromptFamily::Pitch, "high female pitch"},
      {PromptFamily::Pitch, "low pitch"},
      {PromptFamily::Pitch, "high pitch"},
      {PromptFamily::Intensity, "low intensity"},
      {PromptFamily::Intensity, "high intensity"},
      {PromptFamily::SpeechRate, "low speech rate"},
      {PromptFamily::SpeechRate, "high speech rate"},
      {PromptFamily::ArticulationRate, "low articulation rate"},
      {PromptFamily::ArticulationRate, "high articulation rate"},
  };
  for (const std::string& emotion : emotions) {
    auto parsed = parse_prompt(render_prompt(PromptFamily::ClassLabel, std::nullopt, emotion));
    REQUIRE(parsed.has_value());
    CHECK(parsed->family == PromptFamily::ClassLabel);
    CHECK(parsed->emotion == emotion);
    for (const auto& [family, bin] : bins) {
      parsed = parse_prompt(render_prompt(family, bin, emotion));
      REQUIRE(parsed.has_value());
      CHECK(parsed->family == family);
      CHECK(parsed->bin == bin);
      CHECK(parsed->emotion == emotion);
    }
  }
  CHECK(!parse_prompt("").has_value());
  CHECK(!parse_prompt("   ").has_value());
}

TEST_CASE("augment yields five ordered pairs for voiced clips") {
  const AcousticProfile p = voiced_profile();
  const std::vector<AudioTextPair> pairs = augment(p, "anger", BinRules{});
  REQUIRE(pairs.size() == 5);
  CHECK(pairs[0].prompt == "anger");
  CHECK(pairs[1].prompt == "high female pitch anger");
  CHECK(pairs[2].prompt == "high intensity anger");
  CHECK(pairs[3].prompt == "low speech rate anger");
  CHECK(pairs[4].prompt == "high articulation rate anger");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].audio_id == "clip0");
    CHECK(pairs[i].family == kAllFamilies[i]);
  }
}

TEST_CASE("augment omits the pitch pair for unvoiced clips") {
  AcousticProfile p = voiced_profile();
  p.pitch_hz = 0.0;
  const std::vector<AudioTextPair> pairs = augment(p, "anger", BinRules{});
  REQUIRE(pairs.size() == 4);
  for (const AudioTextPair& pair : pairs) CHECK(pair.family != PromptFamily::Pitch);
}

TEST_CASE("changing the emotion changes only the suffix") {
  const AcousticProfile p = voiced_profile();
  const auto a = augment(p, "anger", BinRules{});
  const auto b = augment(p, "sad", BinRules{});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto pa = parse_prompt(a[i].prompt);
    auto pb = parse_prompt(b[i].prompt);
    REQUIRE(pa.has_value());
    REQUIRE(pb.has_value());
    CHECK(pa->bin == pb->bin);
    CHECK(pa->emotion == "anger");
    CHECK(pb->emotion == "sad");
  }
}

TEST_CASE("augment is deterministic") {
  const AcousticProfile p = voiced_profile();
  CHECK(augment(p, "anger", BinRules{}) == augment(p, "anger", BinRules{}));
}

TEST_CASE("concatenated prompt mode emits one pair holding every bin") {
  const AcousticProfile p = voiced_profile();
  const AudioTextPair pair = concat_prompt_pair(p, "anger", BinRules{});
  CHECK(pair.prompt ==
        "high female pitch high intensity low speech rate high articulation rate anger");
}

TEST_CASE("bin rules validate cutoff ordering") {
  BinRules bad;
  bad.pitch_cutoffs_four = {180.0, 132.5, 210.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
