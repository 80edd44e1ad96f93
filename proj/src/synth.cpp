#include "emoclap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "emoclap/dsp.hpp"
#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative harmonic amplitudes of the voiced carrier.
constexpr double kHarmonics[3] = {1.0, 0.5, 0.25};
constexpr double kRampFraction = 0.1;  // cosine ramp share of each burst

double carrier_rms_unit() {
  double s = 0.0;
  for (double a : kHarmonics) s += a * a;
  return std::sqrt(s / 2.0);
}

bool near_any_cutoff(double value, std::initializer_list<double> cutoffs) {
  for (double c : cutoffs) {
    if (std::abs(value - c) / c < 0.05) return true;
  }
  return false;
}

}  // namespace

void ClipSpec::validate() const {
  if (!(duration_s > 0.0)) throw InvalidSpec("duration must be positive");
  if (sample_rate < 8000) throw InvalidSpec("sample rate too low");
  if (f0 != 0.0 && (f0 < 60.0 || f0 > 600.0)) throw InvalidSpec("f0 must be 0 or in [60, 600]");
  if (n_syllables < 0) throw InvalidSpec("negative syllable count");
  if (!(phonation_fraction > 0.0) || phonation_fraction > 1.0) {
    throw InvalidSpec("phonation_fraction must be in (0, 1]");
  }
  const double rms = kPressureRef * std::pow(10.0, peak_db / 20.0);
  const double gain = rms / carrier_rms_unit();
  if (gain * (kHarmonics[0] + kHarmonics[1] + kHarmonics[2]) > 1.0) {
    throw InvalidSpec("peak_db would clip full-scale samples");
  }
  if (n_syllables > 0 && duration_s * phonation_fraction / n_syllables < 0.05) {
    throw InvalidSpec("bursts shorter than 50 ms are not resolvable");
  }
}

AudioClip synth_clip(const ClipSpec& spec) {
  spec.validate();
  AudioClip clip;
  clip.id = spec.id.empty() ? "clip" : spec.id;
  clip.sample_rate = spec.sample_rate;
  const int n = static_cast<int>(std::lround(spec.duration_s * spec.sample_rate));
  clip.samples.assign(static_cast<std::size_t>(n), 0.0);
  if (spec.n_syllables == 0) return clip;  // silence

  const double target_rms = kPressureRef * std::pow(10.0, spec.peak_db / 20.0);
  const double gain = target_rms / (spec.f0 > 0.0 ? carrier_rms_unit() : 1.0 / std::sqrt(3.0));

  Rng rng(spec.seed);
  const double phase = rng.uniform(0.0, 2.0 * kPi);

  const double slot_s = spec.duration_s / spec.n_syllables;
  const double burst_s = slot_s * spec.phonation_fraction;
  const int ramp = std::max(1, static_cast<int>(std::lround(kRampFraction * burst_s * spec.sample_rate)));

  for (int b = 0; b < spec.n_syllables; ++b) {
    const double start_s = (b + 0.5) * slot_s - 0.5 * burst_s;
    const int i0 = static_cast<int>(std::lround(start_s * spec.sample_rate));
    const int i1 = std::min(n, static_cast<int>(std::lround((start_s + burst_s) * spec.sample_rate)));
    for (int i = std::max(0, i0); i < i1; ++i) {
      double env = 1.0;
      const int from_start = i - i0;
      const int from_end = i1 - 1 - i;
      if (from_start < ramp) env = 0.5 * (1.0 - std::cos(kPi * (from_start + 1) / (ramp + 1)));
      if (from_end < ramp) env = std::min(env, 0.5 * (1.0 - std::cos(kPi * (from_end + 1) / (ramp + 1))));

      const double t = static_cast<double>(i) / spec.sample_rate;
      double carrier;
      if (spec.f0 > 0.0) {
        carrier = 0.0;
        for (int h = 0; h < 3; ++h) {
          carrier += kHarmonics[h] * std::sin(2.0 * kPi * spec.f0 * (h + 1) * t + phase);
        }
      } else {
        carrier = rng.uniform(-1.0, 1.0);  // rms 1/sqrt(3), matched by gain above
      }
      clip.samples[static_cast<std::size_t>(i)] = gain * env * carrier;
    }
  }
  return clip;
}

std::vector<ManifestRow> gen_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir,
                                    const BinRules& rules) {
  if (spec.classes.empty()) throw InvalidSpec("corpus needs at least one class");
  if (spec.clips_per_class < 1) throw InvalidSpec("clips_per_class must be >= 1");
  rules.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create corpus dir: " + out_dir.string());

  std::vector<ManifestRow> rows;
  const int n_train = static_cast<int>(std::lround((1.0 - spec.test_fraction) * spec.clips_per_class));
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const ClassSpec& cls = spec.classes[c];
    for (int j = 0; j < spec.clips_per_class; ++j) {
      Rng rng(derive_seed(spec.seed, c * 1000003ULL + static_cast<std::uint64_t>(j)));

      ClipSpec clip_spec = cls.prototype;
      clip_spec.emotion = cls.emotion;
      clip_spec.seed = rng.next();
      if (clip_spec.f0 > 0.0) {
        clip_spec.f0 *= 1.0 + cls.f0_jitter * rng.uniform(-1.0, 1.0);
      }
      clip_spec.peak_db += cls.db_jitter * rng.uniform(-1.0, 1.0);
      if (clip_spec.n_syllables > 0) {
        // jitter duration so speech rate moves but stays an exact quotient
        const double target_rate =
            cls.prototype.speech_rate() * (1.0 + cls.rate_jitter * rng.uniform(-1.0, 1.0));
        clip_spec.duration_s = clip_spec.n_syllables / target_rate;
      }
      char idbuf[64];
      std::snprintf(idbuf, sizeof(idbuf), "%s_%s_%03d", spec.dataset_tag.c_str(),
                    cls.emotion.c_str(), j);
      clip_spec.id = idbuf;

      const AudioClip clip = synth_clip(clip_spec);
      const std::string wav_name = clip_spec.id + ".wav";
      save_wav(clip, out_dir / wav_name);

      ManifestRow row;
      row.id = clip_spec.id;
      row.path = wav_name;
      row.emotion = cls.emotion;
      row.dataset_tag = spec.dataset_tag;
      row.split = j < n_train ? "train" : "test";

      ExpectedBins bins;
      if (clip_spec.f0 > 0.0) bins.pitch = bin_pitch(clip_spec.f0, rules);
      bins.intensity = bin_intensity(clip_spec.peak_db, rules);
      bins.speech_rate = bin_speech_rate(clip_spec.speech_rate(), rules);
      bins.articulation_rate = bin_articulation_rate(clip_spec.articulation_rate(), rules);
      bins.near_cutoff =
          (clip_spec.f0 > 0.0 &&
           near_any_cutoff(clip_spec.f0, {rules.pitch_cutoffs_four[0], rules.pitch_cutoffs_four[1],
                                          rules.pitch_cutoffs_four[2], rules.pitch_cutoff_two})) ||
          near_any_cutoff(clip_spec.peak_db, {rules.intensity_cutoff}) ||
          near_any_cutoff(clip_spec.speech_rate(), {rules.speech_rate_cutoff}) ||
          near_any_cutoff(clip_spec.articulation_rate(), {rules.articulation_rate_cutoff});
      row.expected = bins;
      rows.push_back(std::move(row));
    }
  }
  write_manifest(rows, out_dir / "manifest.jsonl");
  return rows;
}

CorpusSpec preset_separable(int k, std::uint64_t seed) {
  if (k < 2 || k > 8) throw InvalidSpec("preset_separable supports 2..8 classes");
  static const char* kEmotions[8] = {"anger",   "happiness", "sadness",  "neutral",
                                     "fear",    "disgust",   "surprise", "calm"};
  // Levels sit >= 15% away from every cutoff even after jitter.
  const double pitch_level[2] = {105.0, 255.0};
  const double db_level[2] = {47.0, 72.0};
  // low rate: 4 syllables / ~2.1 s = 1.9 syll/s, artic 3.17; high: 12 / 2.5 s
  // = 4.8 syll/s, artic 6.0
  const double rate_speech[2] = {1.9, 4.8};
  const int rate_syllables[2] = {4, 12};
  const double rate_phonation[2] = {0.6, 0.8};

  CorpusSpec corpus;
  corpus.seed = seed;
  corpus.dataset_tag = "separable" + std::to_string(k);
  for (int c = 0; c < k; ++c) {
    const int pitch_bit = c & 1;
    const int db_bit = (c >> 1) & 1;
    const int rate_bit = (c >> 2) & 1;
    ClassSpec cls;
    cls.emotion = kEmotions[c];
    cls.prototype.f0 = pitch_level[pitch_bit];
    cls.prototype.peak_db = db_level[db_bit];
    cls.prototype.n_syllables = rate_syllables[rate_bit];
    cls.prototype.duration_s = rate_syllables[rate_bit] / rate_speech[rate_bit];
    cls.prototype.phonation_fraction = rate_phonation[rate_bit];
    corpus.classes.push_back(std::move(cls));
  }
  return corpus;
}

CorpusSpec preset_pitch_grid(int k, std::uint64_t seed) {
  if (k < 2 || k > 4) throw InvalidSpec("preset_pitch_grid supports 2..4 classes");
  static const char* kEmotions[4] = {"anger", "happiness", "sadness", "neutral"};
  // One level per pitch bin; everything else identical across classes.
  const double pitch_level[4] = {100.0, 155.0, 194.0, 250.0};

  CorpusSpec corpus;
  corpus.seed = seed;
  corpus.dataset_tag = "pitchgrid" + std::to_string(k);
  for (int c = 0; c < k; ++c) {
    ClassSpec cls;
    cls.emotion = kEmotions[c];
    cls.prototype.f0 = pitch_level[c];
    cls.prototype.peak_db = 70.0;
    cls.prototype.n_syllables = 6;
    cls.prototype.duration_s = 2.4;
    cls.prototype.phonation_fraction = 0.7;
    cls.f0_jitter = 0.02;
    corpus.classes.push_back(std::move(cls));
  }
  return corpus;
}

std::vector<CorpusSpec> preset_tag_shifted(int n_datasets, int k, std::uint64_t seed) {
  if (n_datasets < 2 || n_datasets > 6) throw InvalidSpec("need 2..6 datasets");
  if (k < 2 || k > 4) throw InvalidSpec("preset_tag_shifted supports 2..4 classes");
  static const char* kEmotions[4] = {"anger", "happiness", "sadness", "neutral"};
  static const char* kTags[6] = {"ds_a", "ds_b", "ds_c", "ds_d", "ds_e", "ds_f"};
  const double base_pitch[4] = {100.0, 150.0, 225.0, 320.0};
  const double pitch_shift[6] = {1.0, 0.92, 1.10, 0.88, 1.05, 0.95};
  const double db_shift[6] = {0.0, -6.0, 6.0, 4.0, -4.0, 2.0};

  std::vector<CorpusSpec> corpora;
  for (int d = 0; d < n_datasets; ++d) {
    CorpusSpec corpus;
    corpus.seed = derive_seed(seed, static_cast<std::uint64_t>(d));
    corpus.dataset_tag = kTags[d];
    for (int c = 0; c < k; ++c) {
      ClassSpec cls;
      cls.emotion = kEmotions[c];
      cls.prototype.f0 = std::clamp(base_pitch[c] * pitch_shift[d], 60.0, 600.0);
      cls.prototype.peak_db = 62.0 + db_shift[d];
      cls.prototype.n_syllables = 6;
      cls.prototype.duration_s = 2.0;
      cls.prototype.phonation_fraction = 0.7;
      corpus.classes.push_back(std::move(cls));
    }
    corpora.push_back(std::move(corpus));
  }
  return corpora;
}

}  // namespace emoclap
