#include "emoclap/train.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

namespace {

double tensor_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void adam_update(std::vector<double>& theta, const std::vector<double>& g,
                 std::vector<double>& m, std::vector<double>& v, double lr, double b1,
                 double b2, double eps, double b1t, double b2t) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    const double mhat = m[i] / (1.0 - b1t);
    const double vhat = v[i] / (1.0 - b2t);
    theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam betas must be in (0,1)");
  }
  if (!(tau_min >= 1e-6) || !(tau_max > tau_min)) throw ConfigError("bad tau clamp range");
}

AdamState make_adam_state(const ModelParams& params) {
  AdamState s;
  s.m.proj_audio_w = Mat(params.proj_audio_w.rows, params.proj_audio_w.cols);
  s.m.proj_audio_b.assign(params.proj_audio_b.size(), 0.0);
  s.m.proj_text_w = Mat(params.proj_text_w.rows, params.proj_text_w.cols);
  s.m.proj_text_b.assign(params.proj_text_b.size(), 0.0);
  s.m.log_tau = 0.0;
  s.v = s.m;
  s.t = 0;
  return s;
}

void adam_step(ModelParams& params, const Grads& grads, AdamState& state,
               const TrainConfig& cfg) {
  state.t += 1;
  const double b1t = std::pow(cfg.beta1, static_cast<double>(state.t));
  const double b2t = std::pow(cfg.beta2, static_cast<double>(state.t));

  adam_update(params.proj_audio_w.data, grads.proj_audio_w.data, state.m.proj_audio_w.data,
              state.v.proj_audio_w.data, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, b1t, b2t);
  adam_update(params.proj_audio_b, grads.proj_audio_b, state.m.proj_audio_b,
              state.v.proj_audio_b, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, b1t, b2t);
  adam_update(params.proj_text_w.data, grads.proj_text_w.data, state.m.proj_text_w.data,
              state.v.proj_text_w.data, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, b1t, b2t);
  adam_update(params.proj_text_b, grads.proj_text_b, state.m.proj_text_b,
              state.v.proj_text_b, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, b1t, b2t);

  if (!cfg.freeze_tau) {
    auto& m = state.m.log_tau;
    auto& v = state.v.log_tau;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads.log_tau;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grads.log_tau * grads.log_tau;
    params.log_tau -= cfg.lr * (m / (1.0 - b1t)) / (std::sqrt(v / (1.0 - b2t)) + cfg.eps);
  }
  params.log_tau = std::clamp(params.log_tau, std::log(cfg.tau_min), std::log(cfg.tau_max));
}

std::pair<ModelParams, LossReport> train(const std::vector<EncodedPair>& pairs,
                                         ModelParams params, const TrainConfig& cfg,
                                         std::ostream* progress) {
  cfg.validate();
  if (pairs.size() < 2) throw TooFewPairs("need at least 2 audio-text pairs");

  AdamState state = make_adam_state(params);
  LossReport report;
  Rng rng(cfg.seed);

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Grads last_grads;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) fisher_yates_shuffle(order, rng);

    std::size_t n_batches = pairs.size() / cfg.batch_size;
    std::size_t effective_batch = cfg.batch_size;
    if (n_batches == 0) {
      // Fewer pairs than one batch: train on all of them so the >=2-pairs
      // contract still produces updates.
      n_batches = 1;
      effective_batch = pairs.size();
    }

    double epoch_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      Batch batch;
      batch.reserve(effective_batch);
      for (std::size_t k = 0; k < effective_batch; ++k) {
        batch.push_back(pairs[order[b * effective_batch + k]]);
      }
      LossAndGrads lg = loss_and_grads(batch, params, cfg.freeze_tau);
      adam_step(params, lg.grads, state, cfg);
      epoch_sum += lg.loss;
      ++steps;
      last_grads = std::move(lg.grads);
    }
    if (cfg.keep_partial_batch && effective_batch == cfg.batch_size) {
      const std::size_t rem = pairs.size() % cfg.batch_size;
      if (rem >= 2) {
        Batch batch;
        for (std::size_t k = pairs.size() - rem; k < pairs.size(); ++k) {
          batch.push_back(pairs[order[k]]);
        }
        LossAndGrads lg = loss_and_grads(batch, params, cfg.freeze_tau);
        adam_step(params, lg.grads, state, cfg);
        epoch_sum += lg.loss;
        ++steps;
        last_grads = std::move(lg.grads);
      }
    }

    const double mean_loss = epoch_sum / static_cast<double>(steps);
    report.epoch_loss.push_back(mean_loss);
    if (progress) {
      (*progress) << "epoch=" << epoch << " loss=" << std::setprecision(10) << mean_loss
                  << "\n";
    }
  }

  report.final_loss = report.epoch_loss.back();
  report.grad_norms["proj_audio_w"] = tensor_norm(last_grads.proj_audio_w.data);
  report.grad_norms["proj_audio_b"] = tensor_norm(last_grads.proj_audio_b);
  report.grad_norms["proj_text_w"] = tensor_norm(last_grads.proj_text_w.data);
  report.grad_norms["proj_text_b"] = tensor_norm(last_grads.proj_text_b);
  report.grad_norms["log_tau"] = std::abs(last_grads.log_tau);
  return {std::move(params), std::move(report)};
}

}  // namespace emoclap
