#include "emoclap/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

namespace {

void check_emotion(const std::string& emotion) {
  if (emotion.empty()) throw InvalidEmotion("emotion label is empty");
  for (char c : emotion) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw InvalidEmotion("emotion label must be a single token: '" + emotion + "'");
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      throw InvalidEmotion("emotion label must be lowercase: '" + emotion + "'");
    }
  }
}

struct BinTemplate {
  const char* bin;
  PromptFamily family;
};

// Longest bins first so the parser can match greedily on whole words.
constexpr BinTemplate kBinTemplates[] = {
    {"high articulation rate", PromptFamily::ArticulationRate},
    {"low articulation rate", PromptFamily::ArticulationRate},
    {"high speech rate", PromptFamily::SpeechRate},
    {"low speech rate", PromptFamily::SpeechRate},
    {"high female pitch", PromptFamily::Pitch},
    {"low female pitch", PromptFamily::Pitch},
    {"high male pitch", PromptFamily::Pitch},
    {"low male pitch", PromptFamily::Pitch},
    {"high intensity", PromptFamily::Intensity},
    {"low intensity", PromptFamily::Intensity},
    {"high pitch", PromptFamily::Pitch},
    {"low pitch", PromptFamily::Pitch},
};

}  // namespace

std::string family_name(PromptFamily f) {
  switch (f) {
    case PromptFamily::ClassLabel: return "class_label";
    case PromptFamily::Pitch: return "pitch";
    case PromptFamily::Intensity: return "intensity";
    case PromptFamily::SpeechRate: return "speech_rate";
    case PromptFamily::ArticulationRate: return "articulation_rate";
  }
  throw Error("unknown prompt family");
}

PromptFamily family_from_name(std::string_view name) {
  for (PromptFamily f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw Error("unknown prompt family name: " + std::string(name));
}

void BinRules::validate() const {
  if (!(pitch_cutoff_two > 0.0) || !(intensity_cutoff > 0.0) ||
      !(speech_rate_cutoff > 0.0) || !(articulation_rate_cutoff > 0.0)) {
    throw ConfigError("bin cutoffs must be positive");
  }
  if (!(pitch_cutoffs_four[0] > 0.0) || !(pitch_cutoffs_four[0] < pitch_cutoffs_four[1]) ||
      !(pitch_cutoffs_four[1] < pitch_cutoffs_four[2])) {
    throw ConfigError("four-bin pitch cutoffs must be strictly increasing");
  }
}

std::string bin_pitch(double pitch_hz, const BinRules& rules) {
  if (!(pitch_hz > 0.0)) throw UnvoicedClip("no voiced frames: pitch prompt undefined");
  if (rules.pitch_mode == PitchMode::TwoBin) {
    return pitch_hz >= rules.pitch_cutoff_two ? "high pitch" : "low pitch";
  }
  const auto& c = rules.pitch_cutoffs_four;
  if (pitch_hz < c[0]) return "low male pitch";
  if (pitch_hz < c[1]) return "high male pitch";
  if (pitch_hz < c[2]) return "low female pitch";
  return "high female pitch";
}

std::string bin_intensity(double db, const BinRules& rules) {
  if (!std::isfinite(db)) throw Error("non-finite intensity");
  return db >= rules.intensity_cutoff ? "high intensity" : "low intensity";
}

std::string bin_speech_rate(double rate, const BinRules& rules) {
  if (!(rate >= 0.0)) throw Error("negative speech rate");
  return rate >= rules.speech_rate_cutoff ? "high speech rate" : "low speech rate";
}

std::string bin_articulation_rate(double rate, const BinRules& rules) {
  if (!(rate >= 0.0)) throw Error("negative articulation rate");
  return rate >= rules.articulation_rate_cutoff ? "high articulation rate"
                                                : "low articulation rate";
}

std::string render_prompt(PromptFamily family, const std::optional<std::string>& bin,
                          const std::string& emotion) {
  check_emotion(emotion);
  if (family == PromptFamily::ClassLabel) return emotion;
  if (!bin || bin->empty()) {
    throw MissingBin("family " + family_name(family) + " requires a bin label");
  }
  return *bin + " " + emotion;
}

std::optional<ParsedPrompt> parse_prompt(std::string_view prompt) {
  const std::vector<std::string> tokens = split_ws(prompt);
  if (tokens.empty()) return std::nullopt;

  std::string normalized = tokens[0];
  for (std::size_t i = 1; i < tokens.size(); ++i) normalized += " " + tokens[i];

  for (const auto& t : kBinTemplates) {
    const std::string bin(t.bin);
    if (normalized.size() > bin.size() + 1 && normalized.compare(0, bin.size(), bin) == 0 &&
        normalized[bin.size()] == ' ') {
      const std::string rest = normalized.substr(bin.size() + 1);
      if (rest.find(' ') != std::string::npos) continue;  // emotion is one token
      return ParsedPrompt{t.family, bin, rest};
    }
  }
  return ParsedPrompt{PromptFamily::ClassLabel, std::nullopt, normalized};
}

std::vector<AudioTextPair> augment(const AcousticProfile& profile, const std::string& emotion,
                                   const BinRules& rules) {
  check_emotion(emotion);
  std::vector<AudioTextPair> pairs;
  pairs.reserve(5);
  for (PromptFamily family : kAllFamilies) {
    std::optional<std::string> bin;
    switch (family) {
      case PromptFamily::ClassLabel:
        break;
      case PromptFamily::Pitch:
        if (profile.pitch_hz <= 0.0) continue;  // unvoiced: no pitch pair
        bin = bin_pitch(profile.pitch_hz, rules);
        break;
      case PromptFamily::Intensity:
        bin = bin_intensity(profile.intensity_db, rules);
        break;
      case PromptFamily::SpeechRate:
        bin = bin_speech_rate(profile.speech_rate, rules);
        break;
      case PromptFamily::ArticulationRate:
        bin = bin_articulation_rate(profile.articulation_rate, rules);
        break;
    }
    pairs.push_back({profile.clip_id, render_prompt(family, bin, emotion), family});
  }
  return pairs;
}

AudioTextPair concat_prompt_pair(const AcousticProfile& profile, const std::string& emotion,
                                 const BinRules& rules) {
  check_emotion(emotion);
  std::string prompt;
  if (profile.pitch_hz > 0.0) prompt += bin_pitch(profile.pitch_hz, rules) + " ";
  prompt += bin_intensity(profile.intensity_db, rules) + " ";
  prompt += bin_speech_rate(profile.speech_rate, rules) + " ";
  prompt += bin_articulation_rate(profile.articulation_rate, rules) + " ";
  prompt += emotion;
  return {profile.clip_id, prompt, PromptFamily::ClassLabel};
}

}  // namespace emoclap
