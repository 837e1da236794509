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

#pragma once

#include <memory>

#include <Eigen/Core>

#include "brushwork/image.hpp"

namespace brushwork {

struct SinkhornConfig {
  int ot_resolution = 48;
  double epsilon = 0.01;  // weight of the entropy term
  int n_iter = 5;
  double marginal_floor = 1e-6;

  void validate() const;
};

struct LossWeights {
  double beta_l1 = 1.0;
  double beta_ot = 0.1;

  void validate() const;
};

struct LossReport {
  double l1 = 0;
  double ot = 0;
  double total = 0;
};

/// A scalar loss and its gradient with respect to the first image.
struct LossValue {
  double value = 0;
  Canvas gradient;
};

struct TotalLoss {
  LossReport report;
  Canvas gradient;
};

struct SinkhornResult {
  Eigen::MatrixXd plan;
  double loss = 0;
};

/// Mean absolute difference over all pixels and channels.
LossValue l1_loss(const Canvas& canvas, const Canvas& reference);

/// Entropic transport plan between marginals p and q under `cost`, by
/// n_iter log-domain scaling rounds (columns, then rows). The marginals are
/// normalized to unit mass. Throws std::invalid_argument on negative or
/// zero-sum marginals and on shape mismatch.
SinkhornResult sinkhorn_plan(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                             const Eigen::MatrixXd& cost, const SinkhornConfig& cfg);

/// Euclidean distances between the pixel centers of a side x side grid,
/// with coordinates normalized to the unit square. Row-major pixel order.
Eigen::MatrixXd grid_cost_matrix(int side);

/// Transport mass of an image: area-downsampled darkness (1 - mean RGB)
/// plus the floor, normalized to sum to one. Row-major, ot_resolution^2.
Eigen::VectorXd transport_marginal(const Canvas& image, const SinkhornConfig& cfg);

/// Sinkhorn loss between two images, differentiated through the
/// downsampling, the normalization and every unrolled scaling round.
class OtLoss {
 public:
  OtLoss(const Canvas& reference, const SinkhornConfig& cfg);
  ~OtLoss();
  OtLoss(OtLoss&&) noexcept;
  OtLoss& operator=(OtLoss&&) noexcept;

  LossValue evaluate(const Canvas& canvas, bool with_gradient = true) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LossValue ot_loss(const Canvas& canvas, const Canvas& reference, const SinkhornConfig& cfg);

/// beta_l1 * L1 + beta_ot * OT against a fixed reference.
class PaintingObjective {
 public:
  PaintingObjective(const Canvas& reference, const LossWeights& weights,
                    const SinkhornConfig& cfg);

  TotalLoss evaluate(const Canvas& canvas) const;
  const Canvas& reference() const { return reference_; }

 private:
  Canvas reference_;
  LossWeights weights_;
  OtLoss ot_;
};

TotalLoss total_loss(const Canvas& canvas, const Canvas& reference, const LossWeights& weights,
                     const SinkhornConfig& cfg);

/// Exact optimal transport cost min <D, P> over the transport polytope,
/// by successive shortest augmenting paths. Test-scale inputs only
/// (at most 64 bins per side). Throws std::invalid_argument when the
/// marginals have different total mass.
double exact_ot_oracle(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                       const Eigen::MatrixXd& cost);

}  // namespace brushwork
