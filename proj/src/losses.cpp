// Copyright 2026 The Brushwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "brushwork/losses.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace brushwork {

void SinkhornConfig::validate() const {
  if (ot_resolution < 4) throw std::invalid_argument("sinkhorn: ot_resolution must be >= 4");
  if (!(epsilon > 0)) throw std::invalid_argument("sinkhorn: epsilon must be positive");
  if (n_iter < 1) throw std::invalid_argument("sinkhorn: n_iter must be >= 1");
  if (!(marginal_floor > 0)) throw std::invalid_argument("sinkhorn: marginal_floor must be > 0");
}

void LossWeights::validate() const {
  if (!(beta_l1 >= 0) || !(beta_ot >= 0))
    throw std::invalid_argument("loss weights must be nonnegative");
}

LossValue l1_loss(const Canvas& canvas, const Canvas& reference) {
  if (!canvas.same_shape(reference)) throw std::invalid_argument("l1_loss: shape mismatch");
  const double count = 3.0 * static_cast<double>(canvas.height() * canvas.width());
  LossValue out;
  double sum = 0;
  for (int c = 0; c < 3; ++c) {
    const PlaneD diff = canvas[c] - reference[c];
    sum += diff.abs().sum();
    out.gradient.channel[c] = diff.sign() / count;
  }
  out.value = sum / count;
  return out;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Raised by the fast grid kernel when a shifted sum leaves the safe range;
// the caller then repeats the solve with the exact dense kernel.
struct OutOfRange : std::runtime_error {
  OutOfRange() : std::runtime_error("sinkhorn grid kernel out of range") {}
};

// Exact log-domain kernel exp(-D / eps) over an explicit cost matrix.
// Every log-sum-exp is stabilized by its own maximum.
class DenseLogKernel {
 public:
  DenseLogKernel(const Eigen::MatrixXd& cost, double eps) : cost_(cost), logk_(-cost / eps) {}

  // c_i = log sum_j exp(logk_ij + beta_j)
  Eigen::VectorXd lse_rows(const Eigen::VectorXd& beta) const {
    Eigen::VectorXd out(logk_.rows());
    for (Eigen::Index i = 0; i < logk_.rows(); ++i)
      out[i] = lse(logk_.row(i).transpose() + beta);
    return out;
  }

  // c_j = log sum_i exp(logk_ij + alpha_i)
  Eigen::VectorXd lse_cols(const Eigen::VectorXd& alpha) const {
    Eigen::VectorXd out(logk_.cols());
    for (Eigen::Index j = 0; j < logk_.cols(); ++j) out[j] = lse(logk_.col(j) + alpha);
    return out;
  }

  // y_j = sum_i a_i exp(logk_ij + beta_j - c_i)
  Eigen::VectorXd adj_rows(const Eigen::VectorXd& a, const Eigen::VectorXd& beta,
                           const Eigen::VectorXd& c) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(logk_.cols());
    for (Eigen::Index i = 0; i < logk_.rows(); ++i) {
      if (a[i] == 0.0 || c[i] == kNegInf) continue;
      out.array() += a[i] * (logk_.row(i).transpose().array() + beta.array() - c[i]).exp();
    }
    return out;
  }

  // y_i = sum_j b_j exp(logk_ij + alpha_i - c_j)
  Eigen::VectorXd adj_cols(const Eigen::VectorXd& b, const Eigen::VectorXd& alpha,
                           const Eigen::VectorXd& c) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(logk_.rows());
    for (Eigen::Index j = 0; j < logk_.cols(); ++j) {
      if (b[j] == 0.0 || c[j] == kNegInf) continue;
      out.array() += b[j] * (logk_.col(j).array() + alpha.array() - c[j]).exp();
    }
    return out;
  }

  Eigen::MatrixXd plan(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) const {
    Eigen::MatrixXd p = logk_;
    p.colwise() += alpha;
    p.rowwise() += beta.transpose();
    return p.array().exp().matrix();
  }

  // Transport cost sum D_ij P_ij and its partials in alpha and beta.
  double cost_terms(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                    Eigen::VectorXd* g_alpha, Eigen::VectorXd* g_beta) const {
    const Eigen::MatrixXd weighted = (cost_.array() * plan(alpha, beta).array()).matrix();
    if (g_alpha) *g_alpha = weighted.rowwise().sum();
    if (g_beta) *g_beta = weighted.colwise().sum().transpose();
    return weighted.sum();
  }

 private:
  static double lse(const Eigen::VectorXd& x) {
    const double m = x.maxCoeff();
    if (m == kNegInf) return kNegInf;
    return m + std::log((x.array() - m).exp().sum());
  }

  Eigen::MatrixXd cost_;
  Eigen::MatrixXd logk_;
};

// Kernel on a side x side grid. The cost depends only on (|dy|, |dx|), so
// K x is a sum over row offsets r of (shifted rows of x) * T_r with T_r a
// small Toeplitz block. Log-sum-exps use one global shift; results whose
// shifted sums leave the safe range raise OutOfRange.
class GridKernel {
 public:
  GridKernel(int side, double eps) : n_(side) {
    kernel_.resize(n_);
    weighted_.resize(n_);
    for (int r = 0; r < n_; ++r) {
      kernel_[r].resize(n_, n_);
      weighted_[r].resize(n_, n_);
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
          const double dist = std::hypot(static_cast<double>(r), static_cast<double>(a - b)) / n_;
          kernel_[r](a, b) = std::exp(-dist / eps);
          weighted_[r](a, b) = dist * kernel_[r](a, b);
        }
    }
  }

  Eigen::VectorXd lse_rows(const Eigen::VectorXd& beta) const {
    const double m = beta.maxCoeff();
    const Eigen::VectorXd sums = apply(kernel_, (beta.array() - m).exp().matrix());
    if (!(sums.minCoeff() >= kMinSum)) throw OutOfRange();
    return (sums.array().log() + m).matrix();
  }
  Eigen::VectorXd lse_cols(const Eigen::VectorXd& alpha) const { return lse_rows(alpha); }

  Eigen::VectorXd adj_rows(const Eigen::VectorXd& a, const Eigen::VectorXd& beta,
                           const Eigen::VectorXd& c) const {
    const double m = beta.maxCoeff();
    const Eigen::VectorXd scaled = (a.array() * (m - c.array()).exp()).matrix();
    return ((beta.array() - m).exp() * apply(kernel_, scaled).array()).matrix();
  }
  Eigen::VectorXd adj_cols(const Eigen::VectorXd& b, const Eigen::VectorXd& alpha,
                           const Eigen::VectorXd& c) const {
    return adj_rows(b, alpha, c);
  }

  double cost_terms(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                    Eigen::VectorXd* g_alpha, Eigen::VectorXd* g_beta) const {
    const double ma = alpha.maxCoeff(), mb = beta.maxCoeff();
    if (ma + mb > kMaxExponent || (alpha.array() - ma).minCoeff() < -kMaxExponent ||
        (beta.array() - mb).minCoeff() < -kMaxExponent)
      throw OutOfRange();
    const double scale = std::exp(ma + mb);
    const Eigen::VectorXd ea = (alpha.array() - ma).exp().matrix();
    const Eigen::VectorXd eb = (beta.array() - mb).exp().matrix();
    const Eigen::VectorXd kd_b = apply(weighted_, eb);
    if (g_alpha) *g_alpha = (scale * ea.array() * kd_b.array()).matrix();
    if (g_beta) *g_beta = (scale * eb.array() * apply(weighted_, ea).array()).matrix();
    return scale * ea.dot(kd_b);
  }

 private:
  static constexpr double kMinSum = 1e-280;
  static constexpr double kMaxExponent = 690.0;

  Eigen::VectorXd apply(const std::vector<RowMatrix>& blocks, const Eigen::VectorXd& x) const {
    Eigen::Map<const RowMatrix> in(x.data(), n_, n_);
    Eigen::VectorXd result(x.size());
    Eigen::Map<RowMatrix> out(result.data(), n_, n_);
    out.noalias() = in * blocks[0];
    for (int r = 1; r < n_; ++r) {
      out.bottomRows(n_ - r).noalias() += in.topRows(n_ - r) * blocks[r];
      out.topRows(n_ - r).noalias() += in.bottomRows(n_ - r) * blocks[r];
    }
    return result;
  }

  int n_;
  std::vector<RowMatrix> kernel_;
  std::vector<RowMatrix> weighted_;
};

struct SinkhornOutcome {
  double loss = 0;
  Eigen::VectorXd alpha, beta;
  Eigen::VectorXd grad_p;  // empty unless requested
};

// Unrolled scaling rounds on dimensionless potentials alpha = f / eps,
// beta = g / eps, with P_ij = exp(alpha_i + beta_j - D_ij / eps). Each
// round updates columns then rows, so row marginals are exact on exit.
// The backward pass differentiates through every round.
template <class Kernel>
SinkhornOutcome run_sinkhorn(const Kernel& kernel, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& q, int n_iter, bool want_grad) {
  const Eigen::VectorXd logp = p.array().log().matrix();
  const Eigen::VectorXd logq = q.array().log().matrix();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(p.size());
  Eigen::VectorXd beta;

  std::vector<Eigen::VectorXd> alpha_in, col_lse, betas, row_lse;
  for (int k = 0; k < n_iter; ++k) {
    Eigen::VectorXd cc = kernel.lse_cols(alpha);
    beta = logq - cc;
    Eigen::VectorXd rc = kernel.lse_rows(beta);
    if (want_grad) {
      alpha_in.push_back(alpha);
      col_lse.push_back(std::move(cc));
      betas.push_back(beta);
      row_lse.push_back(rc);
    }
    alpha = logp - rc;
  }

  SinkhornOutcome out;
  Eigen::VectorXd g_alpha, g_beta;
  out.loss = kernel.cost_terms(alpha, beta, want_grad ? &g_alpha : nullptr,
                               want_grad ? &g_beta : nullptr);
  out.alpha = alpha;
  out.beta = beta;
  if (!want_grad) return out;

  out.grad_p = Eigen::VectorXd::Zero(p.size());
  Eigen::VectorXd abar = g_alpha;
  for (int k = n_iter - 1; k >= 0; --k) {
    out.grad_p.array() += abar.array() / p.array();
    Eigen::VectorXd bbar = -kernel.adj_rows(abar, betas[k], row_lse[k]);
    if (k == n_iter - 1) bbar += g_beta;
    if (k == 0) break;
    abar = -kernel.adj_cols(bbar, alpha_in[k], col_lse[k]);
  }
  return out;
}

Eigen::VectorXd normalized_marginal(const Eigen::VectorXd& m, const char* name) {
  if ((m.array() < 0).any() || !m.allFinite())
    throw std::invalid_argument(std::string("sinkhorn: negative or non-finite entries in ") + name);
  const double total = m.sum();
  if (!(total > 0)) throw std::invalid_argument(std::string("sinkhorn: zero-sum marginal ") + name);
  return m / total;
}

}  // namespace

SinkhornResult sinkhorn_plan(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                             const Eigen::MatrixXd& cost, const SinkhornConfig& cfg) {
  if (!(cfg.epsilon > 0) || cfg.n_iter < 1)
    throw std::invalid_argument("sinkhorn_plan: invalid configuration");
  if (cost.rows() != p.size() || cost.cols() != q.size())
    throw std::invalid_argument("sinkhorn_plan: cost shape does not match marginals");
  const Eigen::VectorXd pn = normalized_marginal(p, "p");
  const Eigen::VectorXd qn = normalized_marginal(q, "q");
  const DenseLogKernel kernel(cost, cfg.epsilon);
  const SinkhornOutcome run = run_sinkhorn(kernel, pn, qn, cfg.n_iter, false);
  return {kernel.plan(run.alpha, run.beta), run.loss};
}

Eigen::MatrixXd grid_cost_matrix(int side) {
  const int n = side * side;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d(i, j) = std::hypot(static_cast<double>(i / side - j / side),
                           static_cast<double>(i % side - j % side)) /
                side;
  return d;
}

namespace {

RowMatrix darkness(const Canvas& image) {
  return (1.0 - (image[0] + image[1] + image[2]) / 3.0).matrix();
}

}  // namespace

Eigen::VectorXd transport_marginal(const Canvas& image, const SinkhornConfig& cfg) {
  cfg.validate();
  const int n = cfg.ot_resolution;
  const Eigen::MatrixXd rows = area_resample_matrix(static_cast<int>(image.height()), n);
  const Eigen::MatrixXd cols = area_resample_matrix(static_cast<int>(image.width()), n);
  RowMatrix mass = (rows * darkness(image) * cols.transpose()).cwiseMax(0.0);
  mass.array() += cfg.marginal_floor;
  Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(mass.data(), mass.size());
  return flat / flat.sum();
}

struct OtLoss::Impl {
  SinkhornConfig cfg;
  Eigen::Index height, width;
  Eigen::MatrixXd rows, cols;
  Eigen::VectorXd target;
  GridKernel grid;
  mutable std::once_flag dense_once;
  mutable std::unique_ptr<DenseLogKernel> dense;

  Impl(const Canvas& reference, const SinkhornConfig& c)
      : cfg(c), height(reference.height()), width(reference.width()),
        rows(area_resample_matrix(static_cast<int>(height), c.ot_resolution)),
        cols(area_resample_matrix(static_cast<int>(width), c.ot_resolution)),
        target(transport_marginal(reference, c)), grid(c.ot_resolution, c.epsilon) {}

  const DenseLogKernel& dense_kernel() const {
    std::call_once(dense_once, [this] {
      dense = std::make_unique<DenseLogKernel>(grid_cost_matrix(cfg.ot_resolution), cfg.epsilon);
    });
    return *dense;
  }
};

OtLoss::OtLoss(const Canvas& reference, const SinkhornConfig& cfg) {
  cfg.validate();
  impl_ = std::make_unique<Impl>(reference, cfg);
}
OtLoss::~OtLoss() = default;
OtLoss::OtLoss(OtLoss&&) noexcept = default;
OtLoss& OtLoss::operator=(OtLoss&&) noexcept = default;

LossValue OtLoss::evaluate(const Canvas& canvas, bool with_gradient) const {
  const Impl& im = *impl_;
  if (canvas.height() != im.height || canvas.width() != im.width)
    throw std::invalid_argument("ot_loss: shape mismatch");
  const int n = im.cfg.ot_resolution;

  RowMatrix mass = im.rows * darkness(canvas) * im.cols.transpose();
  // Canvases outside [0, 1] could push mass negative; such bins carry none.
  const RowMatrix active = (mass.array() > 0.0).cast<double>().matrix();
  mass = mass.cwiseMax(0.0);
  mass.array() += im.cfg.marginal_floor;
  const double total = mass.sum();
  const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(mass.data(), mass.size()) / total;

  SinkhornOutcome run;
  try {
    run = run_sinkhorn(im.grid, p, im.target, im.cfg.n_iter, with_gradient);
  } catch (const OutOfRange&) {
    run = run_sinkhorn(im.dense_kernel(), p, im.target, im.cfg.n_iter, with_gradient);
  }

  LossValue out;
  out.value = run.loss;
  if (!with_gradient) return out;

  // Back through normalization p = m / sum(m), then the area downsampling.
  const Eigen::VectorXd gm = (run.grad_p.array() - run.grad_p.dot(p)) / total;
  const RowMatrix gmass = Eigen::Map<const RowMatrix>(gm.data(), n, n).cwiseProduct(active);
  const RowMatrix gdark = im.rows.transpose() * gmass * im.cols;
  for (int c = 0; c < 3; ++c) out.gradient.channel[c] = -gdark.array() / 3.0;
  return out;
}

LossValue ot_loss(const Canvas& canvas, const Canvas& reference, const SinkhornConfig& cfg) {
  if (!canvas.same_shape(reference)) throw std::invalid_argument("ot_loss: shape mismatch");
  return OtLoss(reference, cfg).evaluate(canvas);
}

PaintingObjective::PaintingObjective(const Canvas& reference, const LossWeights& weights,
                                     const SinkhornConfig& cfg)
    : reference_(reference), weights_(weights), ot_(reference, cfg) {
  weights.validate();
}

TotalLoss PaintingObjective::evaluate(const Canvas& canvas) const {
  const LossValue l1 = l1_loss(canvas, reference_);
  const LossValue ot = ot_.evaluate(canvas, weights_.beta_ot != 0.0);
  TotalLoss out;
  out.report.l1 = l1.value;
  out.report.ot = ot.value;
  out.report.total = weights_.beta_l1 * l1.value + weights_.beta_ot * ot.value;
  for (int c = 0; c < 3; ++c) {
    out.gradient.channel[c] = weights_.beta_l1 * l1.gradient[c];
    if (weights_.beta_ot != 0.0) out.gradient.channel[c] += weights_.beta_ot * ot.gradient[c];
  }
  return out;
}

TotalLoss total_loss(const Canvas& canvas, const Canvas& reference, const LossWeights& weights,
                     const SinkhornConfig& cfg) {
  if (!canvas.same_shape(reference)) throw std::invalid_argument("total_loss: shape mismatch");
  return PaintingObjective(reference, weights, cfg).evaluate(canvas);
}

}  // namespace brushwork
