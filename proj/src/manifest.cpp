#include "emoclap/manifest.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "emoclap/errors.hpp"

namespace emoclap {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json row_to_json(const ManifestRow& row) {
  ordered_json j;
  j["id"] = row.id;
  j["path"] = row.path;
  j["emotion"] = row.emotion;
  j["dataset_tag"] = row.dataset_tag;
  j["split"] = row.split;
  if (row.profile) {
    const AcousticProfile& p = *row.profile;
    j["pitch_hz"] = p.pitch_hz;
    j["intensity_db"] = p.intensity_db;
    j["speech_rate"] = p.speech_rate;
    j["articulation_rate"] = p.articulation_rate;
    j["syllable_count"] = p.syllable_count;
    j["duration_s"] = p.duration_s;
    j["phonation_s"] = p.phonation_s;
  }
  if (row.expected) {
    const ExpectedBins& e = *row.expected;
    if (e.pitch) j["expected_pitch_bin"] = *e.pitch;
    j["expected_intensity_bin"] = e.intensity;
    j["expected_speech_rate_bin"] = e.speech_rate;
    j["expected_articulation_rate_bin"] = e.articulation_rate;
    j["near_cutoff"] = e.near_cutoff;
  }
  return j;
}

ManifestRow row_from_json(const ordered_json& j, std::size_t line_no) {
  auto fail = [line_no](const std::string& what) {
    throw ManifestError("line " + std::to_string(line_no) + ": " + what);
  };
  ManifestRow row;
  try {
    row.id = j.at("id").get<std::string>();
    row.path = j.at("path").get<std::string>();
    row.emotion = j.at("emotion").get<std::string>();
    row.dataset_tag = j.at("dataset_tag").get<std::string>();
    row.split = j.at("split").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("missing or mistyped field: ") + e.what());
  }
  if (row.split != "train" && row.split != "test") {
    fail("split must be train or test, got '" + row.split + "'");
  }

  const char* profile_keys[] = {"pitch_hz",       "intensity_db", "speech_rate",
                                "articulation_rate", "syllable_count", "duration_s",
                                "phonation_s"};
  int present = 0;
  for (const char* k : profile_keys) present += j.contains(k) ? 1 : 0;
  if (present != 0 && present != 7) fail("profile fields must be all present or all absent");
  if (present == 7) {
    AcousticProfile p;
    p.clip_id = row.id;
    p.pitch_hz = j.at("pitch_hz").get<double>();
    p.intensity_db = j.at("intensity_db").get<double>();
    p.speech_rate = j.at("speech_rate").get<double>();
    p.articulation_rate = j.at("articulation_rate").get<double>();
    p.syllable_count = j.at("syllable_count").get<int>();
    p.duration_s = j.at("duration_s").get<double>();
    p.phonation_s = j.at("phonation_s").get<double>();
    row.profile = p;
  }

  if (j.contains("expected_intensity_bin")) {
    ExpectedBins e;
    if (j.contains("expected_pitch_bin")) e.pitch = j.at("expected_pitch_bin").get<std::string>();
    e.intensity = j.at("expected_intensity_bin").get<std::string>();
    e.speech_rate = j.at("expected_speech_rate_bin").get<std::string>();
    e.articulation_rate = j.at("expected_articulation_rate_bin").get<std::string>();
    e.near_cutoff = j.at("near_cutoff").get<bool>();
    row.expected = e;
  }
  return row;
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::vector<ManifestRow> rows;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ManifestError("line " + std::to_string(line_no) + ": malformed JSON");
    }
    ManifestRow row = row_from_json(j, line_no);
    if (!seen.insert(row.id).second) {
      throw ManifestError("line " + std::to_string(line_no) + ": duplicate id '" + row.id + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_manifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw IoError("cannot open manifest for write: " + path.string());
  for (const ManifestRow& row : rows) {
    out << row_to_json(row).dump() << "\n";
  }
  if (!out) throw IoError("manifest write failed: " + path.string());
}

std::vector<AudioTextPair> read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pair file: " + path.string());
  std::vector<AudioTextPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ManifestError("line " + std::to_string(line_no) + ": malformed JSON");
    }
    try {
      AudioTextPair p;
      p.audio_id = j.at("audio_id").get<std::string>();
      p.prompt = j.at("prompt").get<std::string>();
      p.family = family_from_name(j.at("family").get<std::string>());
      if (p.prompt.empty()) throw ManifestError("empty prompt");
      pairs.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ManifestError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

void write_pairs(const std::vector<AudioTextPair>& pairs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open pair file for write: " + path.string());
  for (const AudioTextPair& p : pairs) {
    ordered_json j;
    j["audio_id"] = p.audio_id;
    j["prompt"] = p.prompt;
    j["family"] = family_name(p.family);
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("pair file write failed: " + path.string());
}

}  // namespace emoclap
