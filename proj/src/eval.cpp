#include "emoclap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

using ordered_json = nlohmann::ordered_json;

int EvalReport::total() const {
  int n = 0;
  for (const auto& row : confusion) {
    for (int x : row) n += x;
  }
  return n;
}

std::string EvalReport::to_json() const {
  ordered_json j;
  j["accuracy"] = accuracy;
  ordered_json prec = ordered_json::object();
  for (const auto& [family, by_k] : precision_at) {
    ordered_json inner = ordered_json::object();
    for (const auto& [k, v] : by_k) inner["P@" + std::to_string(k)] = v;
    prec[family] = inner;
  }
  j["precision_at"] = prec;
  j["classes"] = classes;
  j["confusion"] = confusion;
  return j.dump(2);
}

std::string EvalReport::to_text_table() const {
  std::ostringstream out;
  if (!precision_at.empty()) {
    std::set<int> ks;
    for (const auto& [_, by_k] : precision_at) {
      for (const auto& [k, _v] : by_k) ks.insert(k);
    }
    out << "query family";
    for (int k : ks) out << "\tP@" << k;
    out << "\n";
    for (const auto& [family, by_k] : precision_at) {
      out << family;
      for (int k : ks) {
        auto it = by_k.find(k);
        out << "\t";
        if (it != by_k.end()) {
          char buf[16];
          std::snprintf(buf, sizeof(buf), "%.3f", it->second);
          out << buf;
        } else {
          out << "-";
        }
      }
      out << "\n";
    }
  }
  if (!classes.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", accuracy);
    out << "accuracy\t" << buf << "\n";
    out << "confusion (rows = truth)\n";
    for (std::size_t i = 0; i < classes.size(); ++i) {
      out << classes[i];
      for (std::size_t p = 0; p < classes.size(); ++p) out << "\t" << confusion[i][p];
      out << "\n";
    }
  }
  return out.str();
}

EmbeddingIndex build_index(const std::vector<IndexInput>& inputs, const ModelParams& params,
                           const MelConfig& mel_cfg, const BinRules& rules) {
  if (inputs.empty()) throw Error("cannot build an empty index");
  EmbeddingIndex index;
  index.embeddings = Mat(inputs.size(), params.cfg.joint_dim);
  index.clip_ids.resize(inputs.size());
  index.meta.resize(inputs.size());

  std::set<std::string> seen;
  for (const IndexInput& in : inputs) {
    if (!seen.insert(in.clip.id).second) {
      throw Error("duplicate clip id in index: " + in.clip.id);
    }
  }

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const IndexInput& in = inputs[i];
    const std::vector<double> feat = encode_audio(log_mel(in.clip, mel_cfg), params);
    const std::vector<double> e = project(feat, params.proj_audio_w, params.proj_audio_b);
    for (std::size_t k = 0; k < e.size(); ++k) index.embeddings(i, k) = e[k];
    index.clip_ids[i] = in.clip.id;
    ClipMeta meta;
    meta.emotion = in.emotion;
    meta.dataset_tag = in.dataset_tag;
    if (in.profile.pitch_hz > 0.0) {
      meta.bins[family_name(PromptFamily::Pitch)] = bin_pitch(in.profile.pitch_hz, rules);
    }
    meta.bins[family_name(PromptFamily::Intensity)] = bin_intensity(in.profile.intensity_db, rules);
    meta.bins[family_name(PromptFamily::SpeechRate)] =
        bin_speech_rate(in.profile.speech_rate, rules);
    meta.bins[family_name(PromptFamily::ArticulationRate)] =
        bin_articulation_rate(in.profile.articulation_rate, rules);
    index.meta[i] = std::move(meta);
  }
  return index;
}

RetrievalResult retrieve(const std::string& query, const EmbeddingIndex& index,
                         const ModelParams& params, int k) {
  if (k < 1) throw Error("K must be >= 1");
  const std::vector<double> q =
      project(encode_text(query, params), params.proj_text_w, params.proj_text_b);

  const std::size_t m = index.size();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::vector<double> scores(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) s += q[j] * index.embeddings(i, j);
    scores[i] = s;
  }

  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), m);
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return index.clip_ids[a] < index.clip_ids[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(), better);

  RetrievalResult res;
  res.query = query;
  res.ranked_ids.reserve(top);
  res.scores.reserve(top);
  for (std::size_t i = 0; i < top; ++i) {
    res.ranked_ids.push_back(index.clip_ids[order[i]]);
    res.scores.push_back(scores[order[i]]);
  }
  return res;
}

double precision_at_k(const RetrievalResult& result, const EmbeddingIndex& index,
                      const std::function<bool(const ClipMeta&)>& relevant, int k) {
  if (k < 1) throw Error("K must be >= 1");
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), result.ranked_ids.size());
  if (top == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < top; ++i) {
    const auto it = std::find(index.clip_ids.begin(), index.clip_ids.end(), result.ranked_ids[i]);
    if (it == index.clip_ids.end()) continue;
    const std::size_t idx = static_cast<std::size_t>(it - index.clip_ids.begin());
    if (relevant(index.meta[idx])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(top);
}

std::string classify_embedding(const std::vector<double>& audio_embedding,
                               const std::vector<std::pair<std::string, std::vector<double>>>&
                                   class_embeddings) {
  if (class_embeddings.size() < 2) throw Error("need at least 2 classes");
  std::string best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& [label, e] : class_embeddings) {
    const double s = dot(audio_embedding, e);
    if (s > best_score || (s == best_score && label < best)) {
      best = label;
      best_score = s;
    }
  }
  return best;
}

std::string zero_shot_classify(const AudioClip& clip,
                               const std::vector<std::pair<std::string, std::string>>& class_prompts,
                               const ModelParams& params, const MelConfig& mel_cfg) {
  if (class_prompts.size() < 2) throw Error("need at least 2 classes");
  const std::vector<double> e_a =
      project(encode_audio(log_mel(clip, mel_cfg), params), params.proj_audio_w, params.proj_audio_b);
  std::vector<std::pair<std::string, std::vector<double>>> class_embeddings;
  class_embeddings.reserve(class_prompts.size());
  for (const auto& [label, prompt] : class_prompts) {
    class_embeddings.emplace_back(
        label, project(encode_text(prompt, params), params.proj_text_w, params.proj_text_b));
  }
  return classify_embedding(e_a, class_embeddings);
}

std::vector<AudioTextPair> make_pairs(const std::vector<const LabeledClip*>& clips,
                                      const PromptOptions& opts, const BinRules& rules) {
  std::vector<AudioTextPair> pairs;
  for (const LabeledClip* clip : clips) {
    switch (opts.scheme) {
      case PromptScheme::ClassLabelOnly:
        pairs.push_back({clip->profile.clip_id,
                         render_prompt(PromptFamily::ClassLabel, std::nullopt, clip->emotion),
                         PromptFamily::ClassLabel});
        break;
      case PromptScheme::Augmented: {
        std::vector<AudioTextPair> all = augment(clip->profile, clip->emotion, rules);
        pairs.insert(pairs.end(), all.begin(), all.end());
        break;
      }
      case PromptScheme::SingleFamily: {
        std::vector<AudioTextPair> all = augment(clip->profile, clip->emotion, rules);
        for (AudioTextPair& p : all) {
          if (p.family == opts.family) pairs.push_back(std::move(p));
        }
        break;
      }
    }
  }
  return pairs;
}

std::map<std::string, std::vector<double>> encode_clips(const std::vector<const LabeledClip*>& clips,
                                                        const std::vector<std::string>& ids,
                                                        const ModelParams& params,
                                                        const MelConfig& mel_cfg, unsigned jobs) {
  std::vector<std::vector<double>> feats(clips.size());
  parallel_for(clips.size(), jobs, [&](std::size_t i) {
    feats[i] = encode_audio(log_mel(clips[i]->audio, mel_cfg), params);
  });
  std::map<std::string, std::vector<double>> out;
  for (std::size_t i = 0; i < clips.size(); ++i) out[ids[i]] = std::move(feats[i]);
  return out;
}

std::vector<EncodedPair> encode_pairs(const std::vector<AudioTextPair>& pairs,
                                      const std::map<std::string, std::vector<double>>& audio_feats,
                                      const ModelParams& params) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const AudioTextPair& p : pairs) {
    auto it = audio_feats.find(p.audio_id);
    if (it == audio_feats.end()) throw Error("pair references unknown audio id: " + p.audio_id);
    out.push_back({it->second, encode_text(p.prompt, params), p.audio_id});
  }
  return out;
}

EvalReport evaluate_zero_shot(const std::vector<const LabeledClip*>& test_clips,
                              const std::vector<std::string>& test_ids,
                              const std::vector<std::string>& classes, const ModelParams& params,
                              const MelConfig& mel_cfg, unsigned jobs) {
  if (classes.size() < 2) throw Error("need at least 2 classes");
  EvalReport report;
  report.classes = classes;
  report.confusion.assign(classes.size(), std::vector<int>(classes.size(), 0));

  std::vector<std::pair<std::string, std::vector<double>>> class_embeddings;
  for (const std::string& c : classes) {
    class_embeddings.emplace_back(
        c, project(encode_text(c, params), params.proj_text_w, params.proj_text_b));
  }

  std::vector<std::string> predictions(test_clips.size());
  parallel_for(test_clips.size(), jobs, [&](std::size_t i) {
    const std::vector<double> e_a = project(encode_audio(log_mel(test_clips[i]->audio, mel_cfg), params),
                                            params.proj_audio_w, params.proj_audio_b);
    predictions[i] = classify_embedding(e_a, class_embeddings);
  });

  int correct = 0;
  for (std::size_t i = 0; i < test_clips.size(); ++i) {
    const auto t = std::find(classes.begin(), classes.end(), test_clips[i]->emotion);
    const auto p = std::find(classes.begin(), classes.end(), predictions[i]);
    if (t == classes.end() || p == classes.end()) continue;
    report.confusion[static_cast<std::size_t>(t - classes.begin())]
                    [static_cast<std::size_t>(p - classes.begin())]++;
    if (t == p) ++correct;
  }
  report.accuracy = test_clips.empty() ? 0.0 : static_cast<double>(correct) / test_clips.size();
  (void)test_ids;
  return report;
}

namespace {

std::vector<const LabeledClip*> select_clips(const Dataset& ds, const char* split) {
  std::vector<const LabeledClip*> out;
  for (const LabeledClip& c : ds.clips) {
    if (split == nullptr || c.split == split) out.push_back(&c);
  }
  return out;
}

std::vector<std::string> clip_ids(const std::vector<const LabeledClip*>& clips) {
  std::vector<std::string> ids;
  ids.reserve(clips.size());
  for (const LabeledClip* c : clips) ids.push_back(c->profile.clip_id);
  return ids;
}

std::vector<std::string> sorted_classes(std::set<std::string>& set) {
  return {set.begin(), set.end()};
}

}  // namespace

LeaveOneOutResult leave_one_out(const std::vector<Dataset>& datasets,
                                const std::string& held_out_tag, const ExperimentConfig& cfg) {
  if (datasets.size() < 2) throw UnknownTag("leave-one-out needs at least 2 datasets");
  const Dataset* held_out = nullptr;
  std::vector<const Dataset*> train_sets;
  for (const Dataset& ds : datasets) {
    if (ds.tag == held_out_tag) held_out = &ds;
    else train_sets.push_back(&ds);
  }
  if (held_out == nullptr) throw UnknownTag("no dataset tagged '" + held_out_tag + "'");

  ModelParams params = init_params(cfg.run.encoder);

  std::vector<const LabeledClip*> train_clips;
  std::set<std::string> class_set;
  for (const Dataset* ds : train_sets) {
    for (const LabeledClip& c : ds->clips) {
      train_clips.push_back(&c);
      class_set.insert(c.emotion);
    }
  }

  const std::vector<std::string> train_ids = clip_ids(train_clips);
  const auto audio_feats = encode_clips(train_clips, train_ids, params, cfg.run.mel, cfg.jobs);
  const std::vector<AudioTextPair> pairs = make_pairs(train_clips, cfg.prompts, cfg.run.bins);
  auto [trained, report] = train(encode_pairs(pairs, audio_feats, params), std::move(params),
                                 cfg.run.train);
  (void)report;

  // Class universe: union of training labels and held-out labels, so unseen
  // held-out classes stay scoreable.
  for (const LabeledClip& c : held_out->clips) class_set.insert(c.emotion);
  const std::vector<std::string> classes = sorted_classes(class_set);

  std::vector<const LabeledClip*> test_clips = select_clips(*held_out, "test");
  if (test_clips.empty()) test_clips = select_clips(*held_out, nullptr);

  LeaveOneOutResult result{
      evaluate_zero_shot(test_clips, clip_ids(test_clips), classes, trained, cfg.run.mel, cfg.jobs),
      std::move(trained)};
  return result;
}

ModelParams finetune(ModelParams params, const std::vector<EncodedPair>& target_pairs,
                     TrainConfig cfg) {
  if (cfg.epochs == 0) return params;  // explicit no-op
  if (target_pairs.empty()) throw TooFewPairs("finetune target is empty");
  auto [tuned, report] = train(target_pairs, std::move(params), cfg);
  (void)report;
  return tuned;
}

std::vector<std::pair<std::string, double>> ablation_run(const Dataset& corpus,
                                                         const ExperimentConfig& cfg) {
  const std::vector<const LabeledClip*> train_clips = select_clips(corpus, "train");
  std::vector<const LabeledClip*> test_clips = select_clips(corpus, "test");
  if (train_clips.empty() || test_clips.empty()) {
    throw Error("ablation corpus needs both train and test splits");
  }

  std::set<std::string> class_set;
  for (const LabeledClip& c : corpus.clips) class_set.insert(c.emotion);
  const std::vector<std::string> classes = sorted_classes(class_set);

  struct Config {
    const char* label;
    PromptOptions opts;
  };
  const Config configs[] = {
      {"C", {PromptScheme::ClassLabelOnly, PromptFamily::ClassLabel}},
      {"P", {PromptScheme::SingleFamily, PromptFamily::Pitch}},
      {"I", {PromptScheme::SingleFamily, PromptFamily::Intensity}},
      {"SR", {PromptScheme::SingleFamily, PromptFamily::SpeechRate}},
      {"AR", {PromptScheme::SingleFamily, PromptFamily::ArticulationRate}},
      {"PA", {PromptScheme::Augmented, PromptFamily::ClassLabel}},
  };

  std::vector<std::pair<std::string, double>> table;
  for (const Config& c : configs) {
    ModelParams params = init_params(cfg.run.encoder);
    const std::vector<std::string> ids = clip_ids(train_clips);
    const auto audio_feats = encode_clips(train_clips, ids, params, cfg.run.mel, cfg.jobs);
    const std::vector<AudioTextPair> pairs = make_pairs(train_clips, c.opts, cfg.run.bins);
    auto [trained, report] = train(encode_pairs(pairs, audio_feats, params), std::move(params),
                                   cfg.run.train);
    (void)report;
    const EvalReport eval = evaluate_zero_shot(test_clips, clip_ids(test_clips), classes, trained,
                                               cfg.run.mel, cfg.jobs);
    table.emplace_back(c.label, eval.accuracy);
  }
  return table;
}

void write_svg_bar_chart(const std::filesystem::path& path, const std::string& title,
                         const std::vector<std::pair<std::string, double>>& bars) {
  const int bar_w = 60, gap = 20, height = 220, base = 180, left = 40;
  const int width = left + static_cast<int>(bars.size()) * (bar_w + gap) + gap;
  double vmax = 0.0;
  for (const auto& [_, v] : bars) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
  svg << "<text x=\"" << left << "\" y=\"16\" font-size=\"13\">" << title << "</text>\n";
  svg << "<line x1=\"" << left - 8 << "\" y1=\"" << base << "\" x2=\"" << width - gap
      << "\" y2=\"" << base << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& [label, value] = bars[i];
    const int h = static_cast<int>(std::lround(140.0 * value / vmax));
    const int x = left + static_cast<int>(i) * (bar_w + gap);
    svg << "<rect x=\"" << x << "\" y=\"" << base - h << "\" width=\"" << bar_w << "\" height=\""
        << h << "\" fill=\"#4878cf\"/>\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    svg << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << base - h - 6
        << "\" font-size=\"11\" text-anchor=\"middle\">" << buf << "</text>\n";
    svg << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << base + 16
        << "\" font-size=\"12\" text-anchor=\"middle\">" << label << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write svg: " + path.string());
  out << svg.str();
}

}  // namespace emoclap
