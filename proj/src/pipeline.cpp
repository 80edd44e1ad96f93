#include "emoclap/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

std::vector<ManifestRow> extract_profiles(const std::filesystem::path& corpus_dir,
                                          const RunConfig& cfg, unsigned jobs) {
  const auto manifest_path = corpus_dir / "manifest.jsonl";
  std::vector<ManifestRow> rows = read_manifest(manifest_path);
  const ProfileConfig pc = cfg.profile_config();
  std::vector<AcousticProfile> profiles(rows.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    AudioClip clip = load_wav(corpus_dir / rows[i].path);
    clip.id = rows[i].id;
    profiles[i] = extract_profile(clip, pc);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].profile = profiles[i];
  write_manifest(rows, manifest_path);
  return rows;
}

Dataset load_dataset(const std::filesystem::path& corpus_dir, const RunConfig& cfg,
                     unsigned jobs, bool auto_extract) {
  const auto manifest_path = corpus_dir / "manifest.jsonl";
  const std::vector<ManifestRow> rows = read_manifest(manifest_path);
  if (rows.empty()) throw ManifestError("manifest is empty: " + manifest_path.string());

  bool missing_profiles = false;
  for (const ManifestRow& r : rows) missing_profiles |= !r.profile.has_value();
  if (missing_profiles && !auto_extract) {
    throw ManifestError(
        "manifest rows lack profile fields (pitch_hz, intensity_db, speech_rate, "
        "articulation_rate, syllable_count, duration_s, phonation_s); run `extract` first");
  }

  Dataset ds;
  ds.tag = rows.front().dataset_tag;
  ds.clips.resize(rows.size());
  const ProfileConfig pc = cfg.profile_config();
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const ManifestRow& r = rows[i];
    LabeledClip& c = ds.clips[i];
    c.audio = load_wav(corpus_dir / r.path);
    c.audio.id = r.id;
    c.profile = r.profile ? *r.profile : extract_profile(c.audio, pc);
    c.profile.clip_id = r.id;
    c.emotion = r.emotion;
    c.split = r.split;
  });
  return ds;
}

std::vector<AudioTextPair> pairs_for_split(const Dataset& ds, const std::string& split,
                                           const PromptOptions& opts, const BinRules& rules) {
  std::vector<const LabeledClip*> clips;
  for (const LabeledClip& c : ds.clips) {
    if (split.empty() || c.split == split) clips.push_back(&c);
  }
  return make_pairs(clips, opts, rules);
}

TrainOutcome train_on_dataset(const Dataset& ds, const std::vector<AudioTextPair>& pairs,
                              const ExperimentConfig& cfg, std::ostream* progress) {
  ModelParams params = init_params(cfg.run.encoder);

  std::vector<const LabeledClip*> all_clips;
  std::vector<std::string> ids;
  for (const LabeledClip& c : ds.clips) {
    all_clips.push_back(&c);
    ids.push_back(c.profile.clip_id);
  }
  const auto audio_feats = encode_clips(all_clips, ids, params, cfg.run.mel, cfg.jobs);

  auto [trained, report] = train(encode_pairs(pairs, audio_feats, params), std::move(params),
                                 cfg.run.train, progress);
  return {std::move(trained), std::move(report), pairs.size()};
}

EvalReport evaluate_retrieval(const Dataset& ds, const ModelParams& params,
                              const ExperimentConfig& cfg) {
  std::vector<IndexInput> inputs;
  for (const LabeledClip& c : ds.clips) {
    if (c.split == "test") inputs.push_back({c.audio, c.profile, c.emotion, ds.tag});
  }
  if (inputs.empty()) throw Error("no test split rows to index");
  const EmbeddingIndex index = build_index(inputs, params, cfg.run.mel, cfg.run.bins);

  // Class-label queries: one per emotion. Acoustic queries: every
  // (bin, emotion) combination the collection actually contains.
  std::set<std::string> emotions;
  std::map<std::string, std::set<std::pair<std::string, std::string>>> acoustic_queries;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const ClipMeta& m = index.meta[i];
    emotions.insert(m.emotion);
    for (const auto& [family, bin] : m.bins) {
      acoustic_queries[family].insert({bin, m.emotion});
    }
  }

  EvalReport report;
  auto add_queries = [&](const std::string& family_label,
                         const std::vector<std::pair<std::string, std::function<bool(const ClipMeta&)>>>& queries) {
    for (int k : cfg.run.eval_k) {
      double sum = 0.0;
      for (const auto& [query, relevant] : queries) {
        const RetrievalResult res = retrieve(query, index, params, k);
        sum += precision_at_k(res, index, relevant, k);
      }
      report.precision_at[family_label][k] = queries.empty() ? 0.0 : sum / queries.size();
    }
  };

  std::vector<std::pair<std::string, std::function<bool(const ClipMeta&)>>> class_queries;
  for (const std::string& emotion : emotions) {
    class_queries.emplace_back(emotion, [emotion](const ClipMeta& m) { return m.emotion == emotion; });
  }
  add_queries("class_label", class_queries);

  for (const auto& [family, combos] : acoustic_queries) {
    std::vector<std::pair<std::string, std::function<bool(const ClipMeta&)>>> queries;
    for (const auto& [bin, emotion] : combos) {
      queries.emplace_back(bin + " " + emotion, [family = family, bin = bin, emotion = emotion](const ClipMeta& m) {
        auto it = m.bins.find(family);
        return it != m.bins.end() && it->second == bin && m.emotion == emotion;
      });
    }
    add_queries(family, queries);
  }
  return report;
}

EvalReport evaluate_ser(const Dataset& ds, const ModelParams& params,
                        const ExperimentConfig& cfg) {
  std::vector<const LabeledClip*> test_clips;
  std::vector<std::string> ids;
  std::set<std::string> class_set;
  for (const LabeledClip& c : ds.clips) class_set.insert(c.emotion);
  for (const LabeledClip& c : ds.clips) {
    if (c.split == "test") {
      test_clips.push_back(&c);
      ids.push_back(c.profile.clip_id);
    }
  }
  if (test_clips.empty()) throw Error("no test split rows to classify");
  const std::vector<std::string> classes(class_set.begin(), class_set.end());
  return evaluate_zero_shot(test_clips, ids, classes, params, cfg.run.mel, cfg.jobs);
}

void write_run_record(const std::filesystem::path& out_path, const std::string& command,
                      const RunConfig& cfg, std::uint64_t seed,
                      const std::vector<std::pair<std::string, std::string>>& input_files,
                      const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  j["config_sha256"] = sha256_hex(cfg.canonical_text());
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [name, path] : input_files) {
    inputs[name] = sha256_file_hex(path);
  }
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write run record: " + out_path.string());
  out << j.dump(2) << "\n";
}

}  // namespace emoclap
