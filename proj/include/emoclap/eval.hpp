#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emoclap/config.hpp"
#include "emoclap/encoder.hpp"
#include "emoclap/loss.hpp"
#include "emoclap/manifest.hpp"
#include "emoclap/train.hpp"

namespace emoclap {

struct ClipMeta {
  std::string emotion;
  std::map<std::string, std::string> bins;  // family name -> bin label
  std::string dataset_tag;
};

struct EmbeddingIndex {
  std::vector<std::string> clip_ids;
  Mat embeddings;  // M x d, unit rows
  std::vector<ClipMeta> meta;

  std::size_t size() const { return clip_ids.size(); }
};

struct IndexInput {
  AudioClip clip;
  AcousticProfile profile;
  std::string emotion;
  std::string dataset_tag;
};

struct RetrievalResult {
  std::string query;
  std::vector<std::string> ranked_ids;  // top min(K, M)
  std::vector<double> scores;           // non-increasing cosines
};

struct EvalReport {
  // query family -> K -> mean precision
  std::map<std::string, std::map<int, double>> precision_at;
  double accuracy = 0.0;
  std::vector<std::string> classes;
  std::vector<std::vector<int>> confusion;  // true x predicted

  int total() const;
  std::string to_json() const;
  std::string to_text_table() const;
};

EmbeddingIndex build_index(const std::vector<IndexInput>& inputs, const ModelParams& params,
                           const MelConfig& mel_cfg, const BinRules& rules);

// Rank every clip by cosine against the query's text embedding, descending;
// ties break on ascending clip id.
RetrievalResult retrieve(const std::string& query, const EmbeddingIndex& index,
                         const ModelParams& params, int k);

double precision_at_k(const RetrievalResult& result, const EmbeddingIndex& index,
                      const std::function<bool(const ClipMeta&)>& relevant, int k);

// argmax over class prompts of cosine(audio embedding, prompt embedding);
// ties pick the lexicographically smallest class.
std::string classify_embedding(const std::vector<double>& audio_embedding,
                               const std::vector<std::pair<std::string, std::vector<double>>>&
                                   class_embeddings);

std::string zero_shot_classify(const AudioClip& clip,
                               const std::vector<std::pair<std::string, std::string>>& class_prompts,
                               const ModelParams& params, const MelConfig& mel_cfg);

// A loaded dataset: manifest rows with their audio, profiles already
// extracted.
struct LabeledClip {
  AudioClip audio;
  AcousticProfile profile;
  std::string emotion;
  std::string split;
};

struct Dataset {
  std::string tag;
  std::vector<LabeledClip> clips;
};

enum class PromptScheme { ClassLabelOnly, SingleFamily, Augmented };

struct PromptOptions {
  PromptScheme scheme = PromptScheme::Augmented;
  PromptFamily family = PromptFamily::Pitch;  // used by SingleFamily
};

struct ExperimentConfig {
  RunConfig run;
  PromptOptions prompts;
  unsigned jobs = 1;
};

// Pairs for the clips of a dataset under the prompt options; unvoiced clips
// contribute no pitch pair.
std::vector<AudioTextPair> make_pairs(const std::vector<const LabeledClip*>& clips,
                                      const PromptOptions& opts, const BinRules& rules);

// Train on every dataset except held_out_tag, then zero-shot classify the
// held-out test clips against the union of train and held-out class labels.
struct LeaveOneOutResult {
  EvalReport report;
  ModelParams params;
};
LeaveOneOutResult leave_one_out(const std::vector<Dataset>& datasets,
                                const std::string& held_out_tag, const ExperimentConfig& cfg);

// Continue training on the target pairs with a fresh optimizer state.
// epochs == 0 returns the params unchanged.
ModelParams finetune(ModelParams params, const std::vector<EncodedPair>& target_pairs,
                     TrainConfig cfg);

// One train+eval cycle per prompt configuration: C, P, I, SR, AR, PA.
// Returns label -> test accuracy.
std::vector<std::pair<std::string, double>> ablation_run(const Dataset& corpus,
                                                         const ExperimentConfig& cfg);

// Helpers shared by CLI and tests.
std::vector<EncodedPair> encode_pairs(const std::vector<AudioTextPair>& pairs,
                                      const std::map<std::string, std::vector<double>>& audio_feats,
                                      const ModelParams& params);
std::map<std::string, std::vector<double>> encode_clips(const std::vector<const LabeledClip*>& clips,
                                                        const std::vector<std::string>& ids,
                                                        const ModelParams& params,
                                                        const MelConfig& mel_cfg, unsigned jobs);
EvalReport evaluate_zero_shot(const std::vector<const LabeledClip*>& test_clips,
                              const std::vector<std::string>& test_ids,
                              const std::vector<std::string>& classes, const ModelParams& params,
                              const MelConfig& mel_cfg, unsigned jobs);

// Minimal SVG bar chart (labels below bars, values above).
void write_svg_bar_chart(const std::filesystem::path& path, const std::string& title,
                         const std::vector<std::pair<std::string, double>>& bars);

}  // namespace emoclap
