#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emoclap/audio.hpp"
#include "emoclap/manifest.hpp"
#include "emoclap/prompts.hpp"

namespace emoclap {

// Analytic recipe for one clip: every acoustic ground truth (pitch,
// intensity, both rates) follows from these fields in closed form.
struct ClipSpec {
  std::string id;
  double f0 = 220.0;        // Hz; 0 = unvoiced (noise carrier)
  double peak_db = 70.0;    // plateau intensity on the library dB scale
  int n_syllables = 4;
  double duration_s = 2.0;
  double phonation_fraction = 0.5;  // (0, 1]
  std::string emotion = "neutral";
  std::uint64_t seed = 0;
  int sample_rate = 16000;

  double speech_rate() const { return n_syllables / duration_s; }
  double articulation_rate() const {
    return phonation_fraction > 0.0 ? speech_rate() / phonation_fraction : 0.0;
  }
  void validate() const;
};

// Harmonic carrier (3 harmonics) gated into equal flat-top bursts with short
// cosine ramps; gaps are exact silence. Deterministic from the seed.
AudioClip synth_clip(const ClipSpec& spec);

struct ClassSpec {
  std::string emotion;
  ClipSpec prototype;
  double f0_jitter = 0.03;   // relative
  double db_jitter = 1.5;    // absolute dB
  double rate_jitter = 0.02; // relative, applied via duration
};

struct CorpusSpec {
  std::vector<ClassSpec> classes;
  int clips_per_class = 50;
  std::uint64_t seed = 0;
  std::string dataset_tag = "synth";
  double test_fraction = 0.2;
};

// Writes WAVs plus a manifest whose expected bins come straight from the
// ClipSpec values (not from any extractor) so they can serve as an oracle.
std::vector<ManifestRow> gen_corpus(const CorpusSpec& spec,
                                    const std::filesystem::path& out_dir,
                                    const BinRules& rules);

// K classes on a pitch x intensity (x rate, K > 4) grid. Every generated
// spec keeps at least a 15% margin from every bin cutoff, so extractor bins
// and spec bins must agree.
CorpusSpec preset_separable(int k, std::uint64_t seed);

// K <= 4 classes that differ only in pitch level (one class per pitch bin);
// intensity and rates are identical across classes.
CorpusSpec preset_pitch_grid(int k, std::uint64_t seed);

// n_datasets corpora sharing K emotion classes, with per-dataset acoustic
// shifts (pitch scale, intensity offset) to model dataset mismatch.
std::vector<CorpusSpec> preset_tag_shifted(int n_datasets, int k, std::uint64_t seed);

}  // namespace emoclap
