#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emoclap/dsp.hpp"
#include "emoclap/mat.hpp"

namespace emoclap {

struct EncoderConfig {
  std::size_t audio_feat_dim = 64;     // V
  std::size_t text_feat_dim = 48;      // U
  std::size_t joint_dim = 32;          // d
  std::size_t vocab_hash_size = 4096;
  std::size_t audio_in_dim = 80;       // 2 * n_mels pooled stats
  std::uint64_t seed = 1234;

  static EncoderConfig desk() { return {}; }
  static EncoderConfig paper() {
    EncoderConfig c;
    c.audio_feat_dim = 1024;
    c.text_feat_dim = 768;
    c.joint_dim = 1024;
    return c;
  }

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

// Frozen toy encoders plus the learnable projections and temperature.
// Only proj_* and log_tau are trainable; everything else is fixed by the
// seed at init time.
struct ModelParams {
  EncoderConfig cfg;

  Mat audio_w1;                  // audio_in_dim x V
  std::vector<double> audio_b1;  // V
  Mat audio_w2;                  // V x V
  std::vector<double> audio_b2;  // V
  Mat text_table;                // vocab_hash_size x U

  Mat proj_audio_w;                  // V x d
  std::vector<double> proj_audio_b;  // d
  Mat proj_text_w;                   // U x d
  std::vector<double> proj_text_b;   // d
  double log_tau = 0.0;

  double tau() const { return std::exp(log_tau); }
  bool operator==(const ModelParams&) const = default;
};

// Mean/std pooling over time per mel band: the 2*n_mels input of the frozen
// audio MLP. Exposed for tests.
std::vector<double> pool_mel_stats(const MelFeatures& mel);

// X_a_hat = f_a(X_a): pooled mel stats through the frozen tanh MLP.
std::vector<double> encode_audio(const MelFeatures& mel, const ModelParams& params);

// X_t_hat = f_t(X_t): lowercase, whitespace-tokenize, FNV-1a hash each token
// into the frozen table, average the rows.
std::vector<double> encode_text(std::string_view prompt, const ModelParams& params);

// E = L(x): linear map then L2 normalization onto the unit sphere.
std::vector<double> project(const std::vector<double>& x, const Mat& w,
                            const std::vector<double>& b);

ModelParams init_params(const EncoderConfig& cfg);

// Versioned binary container: header with config and a SHA-256 of the
// payload, then named float64 tensors (little-endian row-major).
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace emoclap
