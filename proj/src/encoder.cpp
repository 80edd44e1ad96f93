#include "emoclap/encoder.hpp"

#include <cmath>

#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

namespace {

void fill_uniform(std::vector<double>& v, Rng& rng, double bound) {
  for (double& x : v) x = rng.uniform(-bound, bound);
}

std::vector<double> affine(const std::vector<double>& x, const Mat& w,
                           const std::vector<double>& b) {
  if (x.size() != w.rows || b.size() != w.cols) {
    throw DimMismatch("affine: input/weight dims disagree");
  }
  std::vector<double> y(b);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double xi = x[i];
    const double* row = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) y[j] += xi * row[j];
  }
  return y;
}

}  // namespace

void EncoderConfig::validate() const {
  if (audio_feat_dim < 2 || text_feat_dim < 2 || joint_dim < 2) {
    throw ConfigError("encoder dims must be >= 2");
  }
  if (vocab_hash_size < 64) throw ConfigError("vocab_hash_size must be >= 64");
  if (audio_in_dim < 2) throw ConfigError("audio_in_dim must be >= 2");
}

std::vector<double> pool_mel_stats(const MelFeatures& mel) {
  std::vector<double> out(static_cast<std::size_t>(mel.n_mels) * 2, 0.0);
  for (int m = 0; m < mel.n_mels; ++m) {
    double mean = 0.0;
    for (int f = 0; f < mel.n_frames; ++f) mean += mel.at(m, f);
    mean /= mel.n_frames;
    double var = 0.0;
    for (int f = 0; f < mel.n_frames; ++f) {
      const double d = mel.at(m, f) - mean;
      var += d * d;
    }
    out[m] = mean;
    out[static_cast<std::size_t>(mel.n_mels) + m] = std::sqrt(var / mel.n_frames);
  }
  return out;
}

std::vector<double> encode_audio(const MelFeatures& mel, const ModelParams& params) {
  const std::vector<double> pooled = pool_mel_stats(mel);
  if (pooled.size() != params.cfg.audio_in_dim) {
    throw DimMismatch("mel pooled dim != encoder audio_in_dim");
  }
  std::vector<double> h = affine(pooled, params.audio_w1, params.audio_b1);
  for (double& x : h) x = std::tanh(x);
  std::vector<double> out = affine(h, params.audio_w2, params.audio_b2);
  for (double& x : out) x = std::tanh(x);
  return out;
}

std::vector<double> encode_text(std::string_view prompt, const ModelParams& params) {
  const std::vector<std::string> tokens = split_ws(to_lower(prompt));
  if (tokens.empty()) throw EmptyPrompt("prompt has no tokens");
  const std::size_t u = params.cfg.text_feat_dim;
  std::vector<double> out(u, 0.0);
  for (const std::string& tok : tokens) {
    const std::size_t row = fnv1a64(tok) % params.cfg.vocab_hash_size;
    const double* src = params.text_table.data.data() + row * u;
    for (std::size_t j = 0; j < u; ++j) out[j] += src[j];
  }
  for (double& x : out) x /= static_cast<double>(tokens.size());
  return out;
}

std::vector<double> project(const std::vector<double>& x, const Mat& w,
                            const std::vector<double>& b) {
  std::vector<double> y = affine(x, w, b);
  const double norm = l2_norm(y);
  if (norm < 1e-12) throw ZeroVector("projected vector has near-zero norm");
  for (double& v : y) v /= norm;
  return y;
}

ModelParams init_params(const EncoderConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.cfg = cfg;

  const std::size_t v = cfg.audio_feat_dim, u = cfg.text_feat_dim, d = cfg.joint_dim;

  Rng frozen_rng(cfg.seed);
  p.audio_w1 = Mat(cfg.audio_in_dim, v);
  fill_uniform(p.audio_w1.data, frozen_rng, 1.0 / std::sqrt(static_cast<double>(cfg.audio_in_dim)));
  p.audio_b1.assign(v, 0.0);
  fill_uniform(p.audio_b1, frozen_rng, 1.0 / std::sqrt(static_cast<double>(cfg.audio_in_dim)));
  p.audio_w2 = Mat(v, v);
  fill_uniform(p.audio_w2.data, frozen_rng, 1.0 / std::sqrt(static_cast<double>(v)));
  p.audio_b2.assign(v, 0.0);
  fill_uniform(p.audio_b2, frozen_rng, 1.0 / std::sqrt(static_cast<double>(v)));
  p.text_table = Mat(cfg.vocab_hash_size, u);
  fill_uniform(p.text_table.data, frozen_rng, 1.0 / std::sqrt(static_cast<double>(u)));

  Rng proj_rng(cfg.seed + 1);
  p.proj_audio_w = Mat(v, d);
  fill_uniform(p.proj_audio_w.data, proj_rng, 1.0 / std::sqrt(static_cast<double>(v)));
  p.proj_audio_b.assign(d, 0.0);
  fill_uniform(p.proj_audio_b, proj_rng, 1.0 / std::sqrt(static_cast<double>(v)));
  p.proj_text_w = Mat(u, d);
  fill_uniform(p.proj_text_w.data, proj_rng, 1.0 / std::sqrt(static_cast<double>(u)));
  p.proj_text_b.assign(d, 0.0);
  fill_uniform(p.proj_text_b, proj_rng, 1.0 / std::sqrt(static_cast<double>(u)));

  p.log_tau = std::log(1.0 / 0.07);
  return p;
}

}  // namespace emoclap
