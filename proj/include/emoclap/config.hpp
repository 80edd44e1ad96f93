#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emoclap/dsp.hpp"
#include "emoclap/encoder.hpp"
#include "emoclap/prompts.hpp"
#include "emoclap/train.hpp"

namespace emoclap {

// Every tunable in one place. Loaded as defaults <- config file <- --set
// overrides, rightmost wins; unknown keys are rejected by name.
struct RunConfig {
  BinRules bins;
  PitchConfig pitch;
  double intensity_frame_s = 0.040;
  double intensity_hop_s = 0.010;
  NucleiConfig nuclei;
  MelConfig mel;
  EncoderConfig encoder;
  TrainConfig train;
  std::vector<int> eval_k = {1, 5, 10};

  ProfileConfig profile_config() const {
    return {pitch, intensity_frame_s, intensity_hop_s, nuclei};
  }

  // Keeps encoder.audio_in_dim consistent with the mel band count.
  void sync_derived();
  void validate() const;

  // Canonical "key = value" listing of every key, sorted; the basis of the
  // provenance hash.
  std::string canonical_text() const;
};

// `section.key = value` lines; '#' starts a comment. Missing file -> error;
// empty path -> defaults only.
RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::string>& overrides);

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace emoclap
