#include "emoclap/loss.hpp"

#include <algorithm>
#include <cmath>

#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

namespace {

struct ProjectedBatch {
  Mat e_a, e_t;                       // N x d unit rows
  std::vector<std::vector<double>> y_a, y_t;  // pre-normalization outputs
  std::vector<double> norm_a, norm_t;
};

ProjectedBatch project_batch(const Batch& batch, const ModelParams& p) {
  const std::size_t n = batch.size();
  const std::size_t d = p.cfg.joint_dim;
  ProjectedBatch out;
  out.e_a = Mat(n, d);
  out.e_t = Mat(n, d);
  out.y_a.resize(n);
  out.y_t.resize(n);
  out.norm_a.resize(n);
  out.norm_t.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (batch[i].audio_feat.size() != p.cfg.audio_feat_dim ||
        batch[i].text_feat.size() != p.cfg.text_feat_dim) {
      throw DimMismatch("batch feature dims do not match params");
    }
    auto run = [&](const std::vector<double>& x, const Mat& w, const std::vector<double>& b,
                   std::vector<double>& y, double& norm, Mat& e, std::size_t row) {
      y = b;
      for (std::size_t k = 0; k < w.rows; ++k) {
        const double xk = x[k];
        const double* wrow = w.data.data() + k * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) y[j] += xk * wrow[j];
      }
      norm = l2_norm(y);
      if (norm < 1e-12) throw ZeroVector("projection collapsed to zero");
      for (std::size_t j = 0; j < w.cols; ++j) e(row, j) = y[j] / norm;
    };
    run(batch[i].audio_feat, p.proj_audio_w, p.proj_audio_b, out.y_a[i], out.norm_a[i], out.e_a, i);
    run(batch[i].text_feat, p.proj_text_w, p.proj_text_b, out.y_t[i], out.norm_t[i], out.e_t, i);
  }
  return out;
}

}  // namespace

Mat similarity_matrix(const Mat& e_t, const Mat& e_a, double tau) {
  if (e_t.rows != e_a.rows || e_t.cols != e_a.cols) {
    throw DimMismatch("similarity: embedding matrices disagree in shape");
  }
  if (!(tau > 0.0)) throw NonFinite("temperature must be positive");
  const std::size_t n = e_t.rows, d = e_t.cols;
  Mat c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += e_t(i, k) * e_a(j, k);
      c(i, j) = tau * s;
    }
  }
  return c;
}

double symmetric_ce_loss(const Mat& c) {
  if (c.rows != c.cols || c.rows == 0) throw DimMismatch("similarity matrix must be square");
  for (double x : c.data) {
    if (!std::isfinite(x)) throw NonFinite("similarity matrix has non-finite entries");
  }
  const std::size_t n = c.rows;

  double loss_text = 0.0;  // softmax over each row
  for (std::size_t i = 0; i < n; ++i) {
    double mx = c(i, 0);
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, c(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += std::exp(c(i, j) - mx);
    loss_text -= c(i, i) - mx - std::log(denom);
  }

  double loss_audio = 0.0;  // softmax over each column
  for (std::size_t j = 0; j < n; ++j) {
    double mx = c(0, j);
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, c(i, j));
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) denom += std::exp(c(i, j) - mx);
    loss_audio -= c(j, j) - mx - std::log(denom);
  }

  const double loss = 0.5 * (loss_text + loss_audio) / static_cast<double>(n);
  if (!std::isfinite(loss)) throw NonFinite("loss is non-finite");
  return loss;
}

double batch_loss(const Batch& batch, const ModelParams& params) {
  const ProjectedBatch pb = project_batch(batch, params);
  return symmetric_ce_loss(similarity_matrix(pb.e_t, pb.e_a, params.tau()));
}

LossAndGrads loss_and_grads(const Batch& batch, const ModelParams& params, bool freeze_tau) {
  if (batch.size() < 2) throw TooFewPairs("batch needs at least 2 pairs");
  const std::size_t n = batch.size();
  const std::size_t d = params.cfg.joint_dim;
  const double tau = params.tau();

  const ProjectedBatch pb = project_batch(batch, params);
  const Mat c = similarity_matrix(pb.e_t, pb.e_a, tau);

  LossAndGrads out;
  out.loss = symmetric_ce_loss(c);
  out.grads.proj_audio_w = Mat(params.proj_audio_w.rows, params.proj_audio_w.cols);
  out.grads.proj_audio_b.assign(d, 0.0);
  out.grads.proj_text_w = Mat(params.proj_text_w.rows, params.proj_text_w.cols);
  out.grads.proj_text_b.assign(d, 0.0);

  // dL/dC = (P - I)/2N + (Q - I)/2N with P row-softmax, Q column-softmax.
  Mat g(n, n);
  const double scale = 0.5 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = c(i, 0);
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, c(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += std::exp(c(i, j) - mx);
    for (std::size_t j = 0; j < n; ++j) {
      g(i, j) = scale * (std::exp(c(i, j) - mx) / denom - (i == j ? 1.0 : 0.0));
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    double mx = c(0, j);
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, c(i, j));
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) denom += std::exp(c(i, j) - mx);
    for (std::size_t i = 0; i < n; ++i) {
      g(i, j) += scale * (std::exp(c(i, j) - mx) / denom - (i == j ? 1.0 : 0.0));
    }
  }

  // C = exp(log_tau) * (E_t . E_a^T), so dL/dlog_tau = sum(G * C).
  if (!freeze_tau) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) acc += g.data[i] * c.data[i];
    out.grads.log_tau = acc;
  }

  std::vector<double> g_e(d), g_y(d);
  for (std::size_t i = 0; i < n; ++i) {
    // text side: dL/de_t[i] = tau * sum_j G[i][j] e_a[j]
    std::fill(g_e.begin(), g_e.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double gij = tau * g(i, j);
      for (std::size_t k = 0; k < d; ++k) g_e[k] += gij * pb.e_a(j, k);
    }
    double ge_dot_e = 0.0;
    for (std::size_t k = 0; k < d; ++k) ge_dot_e += g_e[k] * pb.e_t(i, k);
    for (std::size_t k = 0; k < d; ++k) {
      g_y[k] = (g_e[k] - ge_dot_e * pb.e_t(i, k)) / pb.norm_t[i];
    }
    const std::vector<double>& xt = batch[i].text_feat;
    for (std::size_t r = 0; r < params.proj_text_w.rows; ++r) {
      double* wrow = out.grads.proj_text_w.data.data() + r * d;
      for (std::size_t k = 0; k < d; ++k) wrow[k] += xt[r] * g_y[k];
    }
    for (std::size_t k = 0; k < d; ++k) out.grads.proj_text_b[k] += g_y[k];

    // audio side: dL/de_a[i] = tau * sum_j G[j][i] e_t[j]
    std::fill(g_e.begin(), g_e.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double gji = tau * g(j, i);
      for (std::size_t k = 0; k < d; ++k) g_e[k] += gji * pb.e_t(j, k);
    }
    ge_dot_e = 0.0;
    for (std::size_t k = 0; k < d; ++k) ge_dot_e += g_e[k] * pb.e_a(i, k);
    for (std::size_t k = 0; k < d; ++k) {
      g_y[k] = (g_e[k] - ge_dot_e * pb.e_a(i, k)) / pb.norm_a[i];
    }
    const std::vector<double>& xa = batch[i].audio_feat;
    for (std::size_t r = 0; r < params.proj_audio_w.rows; ++r) {
      double* wrow = out.grads.proj_audio_w.data.data() + r * d;
      for (std::size_t k = 0; k < d; ++k) wrow[k] += xa[r] * g_y[k];
    }
    for (std::size_t k = 0; k < d; ++k) out.grads.proj_audio_b[k] += g_y[k];
  }

  for (double x : out.grads.proj_audio_w.data) {
    if (!std::isfinite(x)) throw NonFinite("gradient is non-finite");
  }
  return out;
}

double finite_diff_check(const Batch& batch, const ModelParams& params, double h,
                         std::size_t min_coords, std::uint64_t seed, bool freeze_tau) {
  const LossAndGrads analytic = loss_and_grads(batch, params, freeze_tau);
  ModelParams probe = params;

  struct Coord {
    double* value;
    double grad;
  };
  std::vector<Coord> coords;
  auto add_tensor = [&](std::vector<double>& values, const std::vector<double>& grads) {
    for (std::size_t i = 0; i < values.size(); ++i) coords.push_back({&values[i], grads[i]});
  };
  add_tensor(probe.proj_audio_w.data, analytic.grads.proj_audio_w.data);
  add_tensor(probe.proj_audio_b, analytic.grads.proj_audio_b);
  add_tensor(probe.proj_text_w.data, analytic.grads.proj_text_w.data);
  add_tensor(probe.proj_text_b, analytic.grads.proj_text_b);
  if (!freeze_tau) coords.push_back({&probe.log_tau, analytic.grads.log_tau});

  std::vector<std::size_t> order(coords.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  fisher_yates_shuffle(order, rng);
  const std::size_t n_check = std::min(coords.size(), std::max<std::size_t>(min_coords, 1));

  double max_rel = 0.0;
  for (std::size_t k = 0; k < n_check; ++k) {
    Coord& c = coords[order[k]];
    const double saved = *c.value;
    *c.value = saved + h;
    const double lp = batch_loss(batch, probe);
    *c.value = saved - h;
    const double lm = batch_loss(batch, probe);
    *c.value = saved;
    const double fd = (lp - lm) / (2.0 * h);
    const double rel = std::abs(c.grad - fd) / std::max({1.0, std::abs(c.grad), std::abs(fd)});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace emoclap
