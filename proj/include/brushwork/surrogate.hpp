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

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "brushwork/image.hpp"
#include "brushwork/random.hpp"
#include "brushwork/rasterizer.hpp"
#include "brushwork/stroke_model.hpp"

namespace brushwork {

/// Fully connected network: ReLU hidden layers, sigmoid output. Samples are
/// columns of the input matrix.
template <typename Scalar>
class DenseNet {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix weight;  // out x in
    Vector bias;
  };

  /// Activations kept by forward() for backward().
  struct Tape {
    std::vector<Matrix> activations;  // input, hidden outputs, final output
  };

  DenseNet() = default;

  /// He-normal weights, zero biases. `sizes` lists input, hidden and output
  /// widths.
  DenseNet(const std::vector<int>& sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw std::invalid_argument("DenseNet: need at least two layer sizes");
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      if (sizes[l] < 1 || sizes[l + 1] < 1)
        throw std::invalid_argument("DenseNet: layer sizes must be positive");
      Layer layer{Matrix(sizes[l + 1], sizes[l]), Vector::Zero(sizes[l + 1])};
      const double scale = std::sqrt(2.0 / sizes[l]);
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
          layer.weight(i, j) = static_cast<Scalar>(scale * rng.normal());
      layers.push_back(std::move(layer));
    }
  }

  int input_size() const { return static_cast<int>(layers.front().weight.cols()); }
  int output_size() const { return static_cast<int>(layers.back().weight.rows()); }

  Matrix forward(const Matrix& input, Tape* tape = nullptr) const {
    if (input.rows() != input_size()) throw std::invalid_argument("DenseNet: input size mismatch");
    if (tape) {
      tape->activations.clear();
      tape->activations.push_back(input);
    }
    Matrix a = input;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      Matrix z = layers[l].weight * a;
      z.colwise() += layers[l].bias;
      if (l + 1 < layers.size())
        a = z.cwiseMax(Scalar(0));
      else
        a = (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
      if (tape) tape->activations.push_back(a);
    }
    return a;
  }

  /// Parameter gradients given dLoss/dOutput (with respect to the sigmoid
  /// output). Layout matches `layers`.
  std::vector<Layer> backward(const Tape& tape, const Matrix& grad_output) const {
    std::vector<Layer> grads(layers.size());
    const Matrix& y = tape.activations.back();
    Matrix dz = (grad_output.array() * y.array() * (Scalar(1) - y.array())).matrix();
    for (std::size_t l = layers.size(); l-- > 0;) {
      const Matrix& a = tape.activations[l];
      grads[l].weight.noalias() = dz * a.transpose();
      grads[l].bias = dz.rowwise().sum();
      if (l == 0) break;
      Matrix da = layers[l].weight.transpose() * dz;
      dz = (da.array() * (a.array() > Scalar(0)).template cast<Scalar>()).matrix();
    }
    return grads;
  }

  template <typename Other>
  DenseNet<Other> cast() const {
    DenseNet<Other> out;
    for (const auto& l : layers)
      out.layers.push_back({l.weight.template cast<Other>(), l.bias.template cast<Other>()});
    return out;
  }

  std::vector<Layer> layers;
};

enum class SurrogateVariant { kRasterOnly, kShadingOnly, kDual };

std::string_view variant_tag(SurrogateVariant v);
std::optional<SurrogateVariant> variant_from_tag(std::string_view tag);

inline constexpr int kSurrogateResolution = 32;

/// One batch of training or validation strokes with hard-rendered targets.
template <typename Scalar>
struct SurrogateBatch {
  using Matrix = typename DenseNet<Scalar>::Matrix;
  Matrix params;        // all stroke parameters, one column per stroke
  Matrix shape_params;  // leading shape slice
  Matrix target_fg;     // 3 * R * R, channel-major then row-major
  Matrix target_alpha;  // R * R
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> transparency;
};

/// Predicted foreground (3R^2 x B) and alpha (R^2 x B).
template <typename Scalar>
struct SurrogatePrediction {
  typename DenseNet<Scalar>::Matrix foreground, alpha;
};

/// Composes the network outputs into (s, alpha) for a variant.
///   Dual:        s = G_s * silhouette, alpha = A * silhouette
///   RasterOnly:  s = silhouette in every channel, alpha = A * silhouette
///   ShadingOnly: s = G_s, alpha = channel mean of G_s
template <typename Scalar>
SurrogatePrediction<Scalar> compose_prediction(SurrogateVariant variant,
                                               const typename DenseNet<Scalar>::Matrix* shading,
                                               const typename DenseNet<Scalar>::Matrix* silhouette,
                                               const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>& a) {
  SurrogatePrediction<Scalar> out;
  switch (variant) {
    case SurrogateVariant::kDual: {
      const Eigen::Index n = silhouette->rows();
      out.foreground.resize(3 * n, silhouette->cols());
      for (int c = 0; c < 3; ++c)
        out.foreground.middleRows(c * n, n) =
            shading->middleRows(c * n, n).cwiseProduct(*silhouette);
      out.alpha = *silhouette * a.asDiagonal();
      break;
    }
    case SurrogateVariant::kRasterOnly:
      out.foreground = silhouette->replicate(3, 1);
      out.alpha = *silhouette * a.asDiagonal();
      break;
    case SurrogateVariant::kShadingOnly: {
      const Eigen::Index n = shading->rows() / 3;
      out.foreground = *shading;
      out.alpha = (shading->topRows(n) + shading->middleRows(n, n) + shading->bottomRows(n)) /
                  Scalar(3);
      break;
    }
  }
  return out;
}

/// Pixel regression loss ||s - s_hat||^2 + ||alpha - alpha_hat||^2, each
/// term averaged over its elements, then over the batch. When gradients are
/// requested they are accumulated into the output vectors (layout of the
/// networks' layers).
template <typename Scalar>
Scalar surrogate_loss(SurrogateVariant variant, const DenseNet<Scalar>* g_s,
                      const DenseNet<Scalar>* g_r, const SurrogateBatch<Scalar>& batch,
                      std::vector<typename DenseNet<Scalar>::Layer>* grad_s = nullptr,
                      std::vector<typename DenseNet<Scalar>::Layer>* grad_r = nullptr) {
  using Matrix = typename DenseNet<Scalar>::Matrix;
  const bool uses_s = variant != SurrogateVariant::kRasterOnly;
  const bool uses_r = variant != SurrogateVariant::kShadingOnly;
  if ((uses_s && !g_s) || (uses_r && !g_r))
    throw std::invalid_argument("surrogate_loss: missing network for variant");
  typename DenseNet<Scalar>::Tape tape_s, tape_r;
  Matrix shading, silhouette;
  if (uses_s) shading = g_s->forward(batch.params, &tape_s);
  if (uses_r) silhouette = g_r->forward(batch.shape_params, &tape_r);
  const auto pred = compose_prediction<Scalar>(variant, uses_s ? &shading : nullptr,
                                               uses_r ? &silhouette : nullptr, batch.transparency);

  const Scalar batch_size = static_cast<Scalar>(batch.params.cols());
  const Scalar n_fg = static_cast<Scalar>(pred.foreground.rows());
  const Scalar n_alpha = static_cast<Scalar>(pred.alpha.rows());
  const Matrix r_fg = pred.foreground - batch.target_fg;
  const Matrix r_alpha = pred.alpha - batch.target_alpha;
  const Scalar loss =
      (r_fg.squaredNorm() / n_fg + r_alpha.squaredNorm() / n_alpha) / batch_size;
  if (!grad_s && !grad_r) return loss;

  const Matrix g_fg = (Scalar(2) / (n_fg * batch_size)) * r_fg;
  const Matrix g_alpha = (Scalar(2) / (n_alpha * batch_size)) * r_alpha;
  const Eigen::Index n = g_alpha.rows();
  Matrix d_shading, d_silhouette;
  switch (variant) {
    case SurrogateVariant::kDual:
      d_shading.resize(3 * n, g_fg.cols());
      d_silhouette = g_alpha * batch.transparency.asDiagonal();
      for (int c = 0; c < 3; ++c) {
        d_shading.middleRows(c * n, n) = g_fg.middleRows(c * n, n).cwiseProduct(silhouette);
        d_silhouette += g_fg.middleRows(c * n, n).cwiseProduct(shading.middleRows(c * n, n));
      }
      break;
    case SurrogateVariant::kRasterOnly:
      d_silhouette = g_alpha * batch.transparency.asDiagonal() + g_fg.topRows(n) +
                     g_fg.middleRows(n, n) + g_fg.bottomRows(n);
      break;
    case SurrogateVariant::kShadingOnly:
      d_shading = g_fg + (g_alpha / Scalar(3)).replicate(3, 1);
      break;
  }
  if (uses_s && grad_s) *grad_s = g_s->backward(tape_s, d_shading);
  if (uses_r && grad_r) *grad_r = g_r->backward(tape_r, d_silhouette);
  return loss;
}

/// Builds a batch by hard-rendering `strokes` at the surrogate resolution.
template <typename Scalar>
SurrogateBatch<Scalar> make_batch(const std::vector<StrokeParams>& strokes);

struct SurrogateModel {
  SurrogateVariant variant = SurrogateVariant::kDual;
  BrushType brush = BrushType::kOilPaint;
  std::optional<DenseNet<float>> g_s;
  std::optional<DenseNet<float>> g_r;
  int resolution = kSurrogateResolution;

  /// Untrained model with the standard layer sizes.
  static SurrogateModel create(SurrogateVariant variant, BrushType brush, int shading_hidden,
                               int raster_hidden, int hidden_layers, std::uint64_t seed);

  /// Renders one stroke. Throws std::invalid_argument on brush mismatch.
  RenderOut forward(const StrokeParams& p) const;
};

struct TrainConfig {
  BrushType brush = BrushType::kOilPaint;
  int epochs = 10;
  int strokes_per_epoch = 12800;
  int batch_size = 64;
  double learning_rate = 2e-4;
  double lr_decay = 1.0;  // multiplies the step size after every epoch
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int shading_hidden = 512;
  int raster_hidden = 256;
  int hidden_layers = 4;
  int validation_strokes = 512;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  SurrogateModel model;
  std::vector<double> validation_psnr;  // after each epoch
  std::vector<double> batch_loss;       // every optimizer step
};

/// 10 log10(1 / MSE), capped at 100 dB when MSE < 1e-10.
double psnr(const PlaneD& a, const PlaneD& b);
double psnr(const Canvas& a, const Canvas& b);

/// Held-out strokes shared by every variant of a brush.
std::vector<StrokeParams> validation_strokes(BrushType brush, int count);

struct SurrogateScore {
  double foreground_psnr = 0;
  double alpha_psnr = 0;
  double mean_psnr = 0;  // average of the two
};

/// Per-stroke PSNR against hard rendering, averaged over `strokes`.
SurrogateScore evaluate_surrogate(const SurrogateModel& model,
                                  const std::vector<StrokeParams>& strokes);

/// Adam on random strokes rendered by hard_rasterize. If `strokes` is
/// nonempty every batch is drawn from it instead.
TrainResult train_surrogate(SurrogateVariant variant, const TrainConfig& cfg,
                            const std::vector<StrokeParams>& strokes = {});

struct AblationRow {
  SurrogateVariant variant;
  SurrogateScore score;
};

/// Trains the three variants under identical settings; rows in the order
/// RasterOnly, ShadingOnly, Dual.
std::vector<AblationRow> ablate_surrogate(const TrainConfig& cfg);

void save_checkpoint(const SurrogateModel& model, const std::string& path);
SurrogateModel load_checkpoint(const std::string& path);

}  // namespace brushwork
