#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "emoclap/loss.hpp"

namespace emoclap {

struct TrainConfig {
  double lr = 1e-4;
  std::size_t batch_size = 16;  // desk-scale; paper preset uses 128
  std::size_t epochs = 30;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool freeze_tau = false;
  bool keep_partial_batch = false;
  double tau_min = 1.0;
  double tau_max = 100.0;

  static TrainConfig paper() {
    TrainConfig c;
    c.batch_size = 128;
    return c;
  }

  void validate() const;
};

struct AdamState {
  Grads m, v;
  std::uint64_t t = 0;
};

AdamState make_adam_state(const ModelParams& params);

// One Adam update with bias correction; tau is clamped to
// [tau_min, tau_max] afterwards.
void adam_step(ModelParams& params, const Grads& grads, AdamState& state,
               const TrainConfig& cfg);

struct LossReport {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  double final_loss = 0.0;
  std::map<std::string, double> grad_norms;  // L2 norms from the last step
};

// Epoch loop: seeded shuffle, fixed-size batches (a trailing partial batch
// is dropped unless keep_partial_batch; when the corpus is smaller than one
// batch, the whole corpus forms the single batch). Prints
// "epoch=<i> loss=<f>" to `progress` when given.
std::pair<ModelParams, LossReport> train(const std::vector<EncodedPair>& pairs,
                                         ModelParams params, const TrainConfig& cfg,
                                         std::ostream* progress = nullptr);

}  // namespace emoclap
