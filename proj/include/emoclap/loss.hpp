#pragma once

#include <string>
#include <vector>

#include "emoclap/encoder.hpp"
#include "emoclap/mat.hpp"

namespace emoclap {

// One contrastive training example: frozen-encoder outputs for the audio
// and its prompt. The i-th audio and i-th text of a batch are the positive
// pair; everything off-diagonal is a negative.
struct EncodedPair {
  std::vector<double> audio_feat;  // X_a_hat, dim V
  std::vector<double> text_feat;   // X_t_hat, dim U
  std::string audio_id;
};

using Batch = std::vector<EncodedPair>;

// Scaled logits C[i][j] = tau * <E_t[i], E_a[j]>. Rows of both inputs must
// be unit-norm so entries are cosines in [-tau, tau].
Mat similarity_matrix(const Mat& e_t, const Mat& e_a, double tau);

// Symmetric InfoNCE: mean of row-wise (text axis) and column-wise (audio
// axis) cross-entropies against the diagonal. Softmaxes are computed with
// max subtraction.
double symmetric_ce_loss(const Mat& c);

struct Grads {
  Mat proj_audio_w;
  std::vector<double> proj_audio_b;
  Mat proj_text_w;
  std::vector<double> proj_text_b;
  double log_tau = 0.0;
};

struct LossAndGrads {
  double loss = 0.0;
  Grads grads;
};

// Loss of a batch under the current params, plus analytic gradients for the
// trainable tensors. The chain runs softmax-CE -> C -> tau and embeddings ->
// L2 normalization (Jacobian (I - e e^T)/||y||) -> linear projections;
// frozen encoder outputs are constants.
LossAndGrads loss_and_grads(const Batch& batch, const ModelParams& params,
                            bool freeze_tau = false);

// Loss only (used by the finite-difference checker).
double batch_loss(const Batch& batch, const ModelParams& params);

// Central-difference check of the analytic gradients over a seeded sample of
// coordinates. Returns the max relative error |a-f| / max(1, |a|, |f|).
double finite_diff_check(const Batch& batch, const ModelParams& params, double h = 1e-5,
                         std::size_t min_coords = 200, std::uint64_t seed = 0,
                         bool freeze_tau = false);

}  // namespace emoclap
