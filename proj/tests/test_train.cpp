#include <doctest.h>

#include <cmath>
#include <sstream>

#include "emoclap/errors.hpp"
#include "emoclap/train.hpp"
#include "emoclap/util.hpp"

using namespace emoclap;

namespace {

Batch random_batch(std::size_t n, const EncoderConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Batch batch;
  for (std::size_t i = 0; i < n; ++i) {
    EncodedPair p;
    p.audio_feat.resize(cfg.audio_feat_dim);
    p.text_feat.resize(cfg.text_feat_dim);
    for (double& x : p.audio_feat) x = rng.uniform(-1.0, 1.0);
    for (double& x : p.text_feat) x = rng.uniform(-1.0, 1.0);
    p.audio_id = "clip" + std::to_string(i);
    batch.push_back(std::move(p));
  }
  return batch;
}

Grads zero_grads(const ModelParams& p) {
  Grads g;
  g.proj_audio_w = Mat(p.proj_audio_w.rows, p.proj_audio_w.cols);
  g.proj_audio_b.assign(p.proj_audio_b.size(), 0.0);
  g.proj_text_w = Mat(p.proj_text_w.rows, p.proj_text_w.cols);
  g.proj_text_b.assign(p.proj_text_b.size(), 0.0);
  g.log_tau = 0.0;
  return g;
}

// Clusterable toy pairs: per-class audio direction + per-class text
// direction with small noise.
std::vector<EncodedPair> clustered_pairs(std::size_t classes, std::size_t per_class,
                                         const EncoderConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> audio_centers, text_centers;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<double> a(cfg.audio_feat_dim), t(cfg.text_feat_dim);
    for (double& x : a) x = rng.uniform(-1.0, 1.0);
    for (double& x : t) x = rng.uniform(-1.0, 1.0);
    audio_centers.push_back(a);
    text_centers.push_back(t);
  }
  std::vector<EncodedPair> pairs;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      EncodedPair p;
      p.audio_feat = audio_centers[c];
      for (double& x : p.audio_feat) x += 0.05 * rng.uniform(-1.0, 1.0);
      p.text_feat = text_centers[c];  // prompts repeat exactly within a class
      p.audio_id = "c" + std::to_string(c) + "_" + std::to_string(i);
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

}  // namespace

TEST_CASE("adam leaves params unchanged on zero gradients") {
  ModelParams p = init_params(EncoderConfig{});
  ModelParams before = p;
  AdamState state = make_adam_state(p);
  adam_step(p, zero_grads(p), state, TrainConfig{});
  CHECK(p == before);
  CHECK(state.t == 1);
}

TEST_CASE("first adam step moves by roughly -lr * sign(g)") {
  ModelParams p = init_params(EncoderConfig{});
  AdamState state = make_adam_state(p);
  Grads g = zero_grads(p);
  g.proj_audio_w(0, 0) = 0.3;
  g.proj_text_b[2] = -0.07;
  TrainConfig cfg;
  const double w_before = p.proj_audio_w(0, 0);
  const double b_before = p.proj_text_b[2];
  adam_step(p, g, state, cfg);
  CHECK(p.proj_audio_w(0, 0) - w_before == doctest::Approx(-cfg.lr).epsilon(1e-6));
  CHECK(p.proj_text_b[2] - b_before == doctest::Approx(cfg.lr).epsilon(1e-6));
}

TEST_CASE("tau stays inside its clamp range") {
  ModelParams p = init_params(EncoderConfig{});
  p.log_tau = std::log(99.0);
  AdamState state = make_adam_state(p);
  Grads g = zero_grads(p);
  g.log_tau = -1.0;  // pushes log_tau up
  TrainConfig cfg;
  cfg.lr = 10.0;  // huge steps to slam into the bound
  for (int i = 0; i < 5; ++i) adam_step(p, g, state, cfg);
  CHECK(p.tau() <= 100.0 + 1e-9);
  CHECK(p.tau() >= 1.0 - 1e-9);
}

TEST_CASE("train rejects degenerate configs and inputs") {
  EncoderConfig ecfg;
  ModelParams p = init_params(ecfg);
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(train(random_batch(8, ecfg, 1), p, cfg), ConfigError);
  cfg = TrainConfig{};
  CHECK_THROWS_AS(train(random_batch(1, ecfg, 1), p, cfg), TooFewPairs);
  cfg.batch_size = 1;
  CHECK_THROWS_AS(train(random_batch(8, ecfg, 1), p, cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.lr = 0.0;
  CHECK_THROWS_AS(train(random_batch(8, ecfg, 1), p, cfg), ConfigError);
}

TEST_CASE("training is bit-deterministic given the seed") {
  EncoderConfig ecfg;
  std::vector<EncodedPair> pairs = clustered_pairs(4, 10, ecfg, 42);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.seed = 7;

  auto [p1, r1] = train(pairs, init_params(ecfg), cfg);
  auto [p2, r2] = train(pairs, init_params(ecfg), cfg);
  CHECK(p1 == p2);
  CHECK(r1.epoch_loss == r2.epoch_loss);

  cfg.shuffle = false;
  auto [p3, r3] = train(pairs, init_params(ecfg), cfg);
  auto [p4, r4] = train(pairs, init_params(ecfg), cfg);
  CHECK(p3 == p4);
  CHECK(r3.epoch_loss == r4.epoch_loss);
}

TEST_CASE("training on a separable toy corpus drives the loss down") {
  EncoderConfig ecfg;
  std::vector<EncodedPair> pairs = clustered_pairs(4, 50, ecfg, 99);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 16;
  cfg.seed = 1;
  cfg.lr = 1e-3;  // toy features train faster than the full pipeline

  std::ostringstream progress;
  auto [trained, report] = train(pairs, init_params(ecfg), cfg, &progress);
  REQUIRE(report.epoch_loss.size() == 30);
  CHECK(report.final_loss < report.epoch_loss.front());
  CHECK(report.final_loss < 0.2);
  CHECK(progress.str().find("epoch=1 loss=") != std::string::npos);
  for (const auto& [name, norm] : report.grad_norms) CHECK(std::isfinite(norm));
}

TEST_CASE("fewer pairs than one batch still trains") {
  EncoderConfig ecfg;
  std::vector<EncodedPair> pairs = clustered_pairs(2, 3, ecfg, 5);  // 6 pairs < batch 16
  TrainConfig cfg;
  cfg.epochs = 2;
  auto [trained, report] = train(pairs, init_params(ecfg), cfg);
  CHECK(report.epoch_loss.size() == 2);
  for (double l : report.epoch_loss) CHECK(std::isfinite(l));
}

TEST_CASE("partial batches are dropped unless kept") {
  EncoderConfig ecfg;
  std::vector<EncodedPair> pairs = clustered_pairs(2, 10, ecfg, 6);  // 20 pairs
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 16;
  cfg.shuffle = false;

  // dropped: one step; kept: two steps, so the trained params differ
  auto [p_drop, r_drop] = train(pairs, init_params(ecfg), cfg);
  cfg.keep_partial_batch = true;
  auto [p_keep, r_keep] = train(pairs, init_params(ecfg), cfg);
  CHECK(!(p_drop == p_keep));
}
