#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emoclap/eval.hpp"

namespace emoclap {

// Computes acoustic profiles for every manifest row and rewrites the
// manifest in place with the profile fields filled in.
std::vector<ManifestRow> extract_profiles(const std::filesystem::path& corpus_dir,
                                          const RunConfig& cfg, unsigned jobs);

// Loads a corpus directory (manifest.jsonl + wavs). Profiles are taken from
// the manifest when present; otherwise they are extracted on the fly when
// auto_extract is set, and rejected when it is not.
Dataset load_dataset(const std::filesystem::path& corpus_dir, const RunConfig& cfg,
                     unsigned jobs, bool auto_extract = true);

// Pair generation for a whole corpus (train+test rows keep their split; the
// caller picks which split to train on).
std::vector<AudioTextPair> pairs_for_split(const Dataset& ds, const std::string& split,
                                           const PromptOptions& opts, const BinRules& rules);

// Trains projections + temperature on the train split of `ds`.
struct TrainOutcome {
  ModelParams params;
  LossReport report;
  std::size_t n_pairs = 0;
};
TrainOutcome train_on_dataset(const Dataset& ds, const std::vector<AudioTextPair>& pairs,
                              const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// Retrieval evaluation over the test split: class-label queries plus the
// acoustic-prompt queries present in the collection. Relevance for acoustic
// queries requires bin AND emotion to match.
EvalReport evaluate_retrieval(const Dataset& ds, const ModelParams& params,
                              const ExperimentConfig& cfg);

// Zero-shot SER over the test split against the corpus class labels.
EvalReport evaluate_ser(const Dataset& ds, const ModelParams& params,
                        const ExperimentConfig& cfg);

// Provenance record: config hash, seed, input hashes. No timestamps, so
// identical runs produce identical bytes.
void write_run_record(const std::filesystem::path& out_path, const std::string& command,
                      const RunConfig& cfg, std::uint64_t seed,
                      const std::vector<std::pair<std::string, std::string>>& input_files,
                      const std::vector<std::string>& outputs);

}  // namespace emoclap
