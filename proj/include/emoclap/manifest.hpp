#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emoclap/dsp.hpp"
#include "emoclap/prompts.hpp"

namespace emoclap {

// Spec-derived bin labels recorded at generation time, for oracle checks
// against extractor-derived bins.
struct ExpectedBins {
  std::optional<std::string> pitch;  // absent for unvoiced clips
  std::string intensity;
  std::string speech_rate;
  std::string articulation_rate;
  bool near_cutoff = false;

  bool operator==(const ExpectedBins&) const = default;
};

struct ManifestRow {
  std::string id;
  std::string path;  // wav path relative to the manifest
  std::string emotion;
  std::string dataset_tag;
  std::string split;  // train | test
  std::optional<AcousticProfile> profile;
  std::optional<ExpectedBins> expected;

  bool operator==(const ManifestRow&) const = default;
};

// JSONL, one row per line, fixed key order, UTF-8, LF. Errors report line
// numbers; duplicate ids and bad split values are rejected.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path);

// Pair files: {"audio_id":..., "prompt":..., "family":...} per line.
std::vector<AudioTextPair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::vector<AudioTextPair>& pairs, const std::filesystem::path& path);

}  // namespace emoclap
