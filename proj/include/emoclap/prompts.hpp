#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emoclap/dsp.hpp"

namespace emoclap {

enum class PromptFamily { ClassLabel, Pitch, Intensity, SpeechRate, ArticulationRate };

inline constexpr std::array<PromptFamily, 5> kAllFamilies = {
    PromptFamily::ClassLabel, PromptFamily::Pitch, PromptFamily::Intensity,
    PromptFamily::SpeechRate, PromptFamily::ArticulationRate};

std::string family_name(PromptFamily f);
PromptFamily family_from_name(std::string_view name);

enum class PitchMode { TwoBin, FourBin };

// Literature-derived cutoffs. Ties always land in the upper bin.
struct BinRules {
  PitchMode pitch_mode = PitchMode::FourBin;
  double pitch_cutoff_two = 170.0;
  std::array<double, 3> pitch_cutoffs_four = {132.5, 180.0, 210.0};
  double intensity_cutoff = 60.0;
  double speech_rate_cutoff = 3.12;
  double articulation_rate_cutoff = 4.0;

  void validate() const;
};

// pitch_hz == 0 (no voiced frames) cannot be binned: throws UnvoicedClip.
std::string bin_pitch(double pitch_hz, const BinRules& rules);
std::string bin_intensity(double db, const BinRules& rules);
std::string bin_speech_rate(double rate, const BinRules& rules);
std::string bin_articulation_rate(double rate, const BinRules& rules);

// ClassLabel renders the bare emotion; every other family renders
// "{bin} {emotion}".
std::string render_prompt(PromptFamily family, const std::optional<std::string>& bin,
                          const std::string& emotion);

struct ParsedPrompt {
  PromptFamily family = PromptFamily::ClassLabel;
  std::optional<std::string> bin;
  std::string emotion;
};

// Inverse of render_prompt over the known bin vocabulary; nullopt for
// strings no template produces (e.g. empty input).
std::optional<ParsedPrompt> parse_prompt(std::string_view prompt);

struct AudioTextPair {
  std::string audio_id;
  std::string prompt;
  PromptFamily family = PromptFamily::ClassLabel;

  bool operator==(const AudioTextPair&) const = default;
};

// Prompt augmentation: one pair per family, in enum order. Unvoiced clips
// skip the pitch pair (4 pairs instead of 5).
std::vector<AudioTextPair> augment(const AcousticProfile& profile, const std::string& emotion,
                                   const BinRules& rules);

// Non-default mode: every acoustic bin concatenated into one prompt. The
// pair is tagged ClassLabel since it represents the whole clip, not one
// property; it intentionally does not follow the per-family templates.
AudioTextPair concat_prompt_pair(const AcousticProfile& profile, const std::string& emotion,
                                 const BinRules& rules);

}  // namespace emoclap
