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


#include "brushwork/surrogate.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

namespace brushwork {

std::string_view variant_tag(SurrogateVariant v) {
  switch (v) {
    case SurrogateVariant::kRasterOnly: return "raster_only";
    case SurrogateVariant::kShadingOnly: return "shading_only";
    case SurrogateVariant::kDual: return "dual";
  }
  return "unknown";
}

std::optional<SurrogateVariant> variant_from_tag(std::string_view tag) {
  for (auto v : {SurrogateVariant::kRasterOnly, SurrogateVariant::kShadingOnly,
                 SurrogateVariant::kDual})
    if (variant_tag(v) == tag) return v;
  return std::nullopt;
}

template <typename Scalar>
SurrogateBatch<Scalar> make_batch(const std::vector<StrokeParams>& strokes) {
  if (strokes.empty()) throw std::invalid_argument("make_batch: no strokes");
  const BrushType brush = strokes.front().brush;
  const int r = kSurrogateResolution, n = r * r;
  const auto b = static_cast<Eigen::Index>(strokes.size());
  SurrogateBatch<Scalar> batch;
  batch.params.resize(param_count(brush), b);
  batch.shape_params.resize(shape_param_count(brush), b);
  batch.target_fg.resize(3 * n, b);
  batch.target_alpha.resize(n, b);
  batch.transparency.resize(b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const StrokeParams& p = strokes[k];
    if (p.brush != brush) throw std::invalid_argument("make_batch: mixed brushes");
    batch.params.col(k) = p.values.cast<Scalar>();
    batch.shape_params.col(k) = p.values.head(shape_param_count(brush)).cast<Scalar>();
    batch.transparency[k] = static_cast<Scalar>(p.transparency());
    const RenderOut out = hard_rasterize(p, r);
    for (int c = 0; c < 3; ++c)
      batch.target_fg.col(k).segment(c * n, n) =
          Eigen::Map<const Eigen::VectorXd>(out.foreground[c].data(), n).cast<Scalar>();
    batch.target_alpha.col(k) = Eigen::Map<const Eigen::VectorXd>(out.alpha.data(), n).cast<Scalar>();
  }
  return batch;
}

template SurrogateBatch<float> make_batch<float>(const std::vector<StrokeParams>&);
template SurrogateBatch<double> make_batch<double>(const std::vector<StrokeParams>&);

SurrogateModel SurrogateModel::create(SurrogateVariant variant, BrushType brush,
                                      int shading_hidden, int raster_hidden, int hidden_layers,
                                      std::uint64_t seed) {
  SurrogateModel m;
  m.variant = variant;
  m.brush = brush;
  const int n = m.resolution * m.resolution;
  auto sizes = [&](int in, int hidden, int out) {
    std::vector<int> s{in};
    for (int l = 0; l < hidden_layers; ++l) s.push_back(hidden);
    s.push_back(out);
    return s;
  };
  if (variant != SurrogateVariant::kRasterOnly)
    m.g_s.emplace(sizes(param_count(brush), shading_hidden, 3 * n), mix_seed(seed, 1));
  if (variant != SurrogateVariant::kShadingOnly)
    m.g_r.emplace(sizes(shape_param_count(brush), raster_hidden, n), mix_seed(seed, 2));
  return m;
}

namespace {

using MatrixF = DenseNet<float>::Matrix;

SurrogatePrediction<float> predict(const SurrogateModel& model, const SurrogateBatch<float>& batch) {
  MatrixF shading, silhouette;
  if (model.g_s) shading = model.g_s->forward(batch.params);
  if (model.g_r) silhouette = model.g_r->forward(batch.shape_params);
  return compose_prediction<float>(model.variant, model.g_s ? &shading : nullptr,
                                   model.g_r ? &silhouette : nullptr, batch.transparency);
}

}  // namespace

RenderOut SurrogateModel::forward(const StrokeParams& p) const {
  if (p.brush != brush) throw std::invalid_argument("surrogate forward: brush mismatch");
  if (!p.has_valid_length()) throw std::invalid_argument("surrogate forward: bad parameter count");
  SurrogateBatch<float> batch;
  batch.params = p.values.cast<float>();
  batch.shape_params = p.values.head(shape_param_count(brush)).cast<float>();
  batch.transparency = Eigen::Matrix<float, 1, 1>::Constant(static_cast<float>(p.transparency()));
  const auto pred = predict(*this, batch);
  const int n = resolution * resolution;
  RenderOut out(resolution, resolution);
  for (int c = 0; c < 3; ++c)
    out.foreground[c] =
        Eigen::Map<const Plane<float>>(pred.foreground.col(0).data() + c * n, resolution, resolution)
            .cast<double>();
  out.alpha =
      Eigen::Map<const Plane<float>>(pred.alpha.col(0).data(), resolution, resolution).cast<double>();
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1 || strokes_per_epoch < 1 || batch_size < 1 || validation_strokes < 1)
    throw std::invalid_argument("train: counts must be positive");
  if (shading_hidden < 1 || raster_hidden < 1 || hidden_layers < 0)
    throw std::invalid_argument("train: invalid layer sizes");
  if (!(learning_rate > 0) || !(lr_decay > 0)) throw std::invalid_argument("train: bad step size");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1) || !(adam_epsilon > 0))
    throw std::invalid_argument("train: bad moment decays");
}

double psnr(const PlaneD& a, const PlaneD& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("psnr: shape mismatch");
  const double mse = (a - b).square().mean();
  return mse < 1e-10 ? 100.0 : 10.0 * std::log10(1.0 / mse);
}

double psnr(const Canvas& a, const Canvas& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
  double sum = 0;
  for (int c = 0; c < 3; ++c) sum += (a[c] - b[c]).square().sum();
  const double mse = sum / (3.0 * static_cast<double>(a.height() * a.width()));
  return mse < 1e-10 ? 100.0 : 10.0 * std::log10(1.0 / mse);
}

std::vector<StrokeParams> validation_strokes(BrushType brush, int count) {
  std::vector<StrokeParams> out;
  out.reserve(count);
  const std::uint64_t base = mix_seed(0x5a11da7eULL, static_cast<std::uint64_t>(brush));
  for (int i = 0; i < count; ++i) out.push_back(sample_random_stroke(brush, mix_seed(base, i)));
  return out;
}

SurrogateScore evaluate_surrogate(const SurrogateModel& model,
                                  const std::vector<StrokeParams>& strokes) {
  if (strokes.empty()) throw std::invalid_argument("evaluate_surrogate: no strokes");
  constexpr std::size_t kChunk = 128;
  auto mse_psnr = [](double mse) { return mse < 1e-10 ? 100.0 : 10.0 * std::log10(1.0 / mse); };
  SurrogateScore score;
  for (std::size_t start = 0; start < strokes.size(); start += kChunk) {
    const std::vector<StrokeParams> chunk(
        strokes.begin() + start, strokes.begin() + std::min(strokes.size(), start + kChunk));
    const auto batch = make_batch<float>(chunk);
    const auto pred = predict(model, batch);
    for (Eigen::Index k = 0; k < pred.alpha.cols(); ++k) {
      score.foreground_psnr +=
          mse_psnr((pred.foreground.col(k) - batch.target_fg.col(k)).cast<double>().squaredNorm() /
                   static_cast<double>(pred.foreground.rows()));
      score.alpha_psnr +=
          mse_psnr((pred.alpha.col(k) - batch.target_alpha.col(k)).cast<double>().squaredNorm() /
                   static_cast<double>(pred.alpha.rows()));
    }
  }
  score.foreground_psnr /= static_cast<double>(strokes.size());
  score.alpha_psnr /= static_cast<double>(strokes.size());
  score.mean_psnr = 0.5 * (score.foreground_psnr + score.alpha_psnr);
  return score;
}

namespace {

using LayerF = DenseNet<float>::Layer;

class Adam {
 public:
  Adam(const DenseNet<float>& net, const TrainConfig& cfg) : cfg_(cfg) {
    for (const auto& l : net.layers) {
      m_.push_back({MatrixF::Zero(l.weight.rows(), l.weight.cols()),
                    DenseNet<float>::Vector::Zero(l.bias.size())});
      v_.push_back(m_.back());
    }
  }

  void step(DenseNet<float>& net, const std::vector<LayerF>& grads, double lr, long t) {
    const float b1 = static_cast<float>(cfg_.beta1), b2 = static_cast<float>(cfg_.beta2);
    const float c1 = static_cast<float>(1.0 - std::pow(cfg_.beta1, t));
    const float c2 = static_cast<float>(1.0 - std::pow(cfg_.beta2, t));
    const float rate = static_cast<float>(lr), eps = static_cast<float>(cfg_.adam_epsilon);
    auto update = [&](auto& w, const auto& g, auto& m, auto& v) {
      m = b1 * m + (1.0f - b1) * g;
      v = b2 * v + (1.0f - b2) * g.cwiseAbs2();
      w.array() -= rate * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      update(net.layers[l].weight, grads[l].weight, m_[l].weight, v_[l].weight);
      update(net.layers[l].bias, grads[l].bias, m_[l].bias, v_[l].bias);
    }
  }

 private:
  TrainConfig cfg_;
  std::vector<LayerF> m_, v_;
};

}  // namespace

TrainResult train_surrogate(SurrogateVariant variant, const TrainConfig& cfg,
                            const std::vector<StrokeParams>& strokes) {
  cfg.validate();
  for (const auto& p : strokes)
    if (p.brush != cfg.brush) throw std::invalid_argument("train: stroke brush mismatch");
  TrainResult result;
  SurrogateModel& model = result.model;
  model = SurrogateModel::create(variant, cfg.brush, cfg.shading_hidden, cfg.raster_hidden,
                                 cfg.hidden_layers, cfg.seed);
  std::optional<Adam> adam_s, adam_r;
  if (model.g_s) adam_s.emplace(*model.g_s, cfg);
  if (model.g_r) adam_r.emplace(*model.g_r, cfg);
  const auto held_out = validation_strokes(cfg.brush, cfg.validation_strokes);

  Rng rng(mix_seed(cfg.seed, 0x7ea1ULL));
  const int steps_per_epoch = std::max(1, cfg.strokes_per_epoch / cfg.batch_size);
  double lr = cfg.learning_rate;
  long t = 0;
  std::vector<StrokeParams> batch_strokes(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int s = 0; s < steps_per_epoch; ++s) {
      for (auto& p : batch_strokes)
        p = strokes.empty() ? sample_random_stroke(cfg.brush, rng.next())
                            : strokes[rng.next() % strokes.size()];
      const auto batch = make_batch<float>(batch_strokes);
      std::vector<LayerF> grad_s, grad_r;
      const float loss = surrogate_loss<float>(variant, model.g_s ? &*model.g_s : nullptr,
                                               model.g_r ? &*model.g_r : nullptr, batch,
                                               &grad_s, &grad_r);
      result.batch_loss.push_back(loss);
      ++t;
      if (adam_s) adam_s->step(*model.g_s, grad_s, lr, t);
      if (adam_r) adam_r->step(*model.g_r, grad_r, lr, t);
    }
    lr *= cfg.lr_decay;
    result.validation_psnr.push_back(evaluate_surrogate(model, held_out).mean_psnr);
  }
  return result;
}

std::vector<AblationRow> ablate_surrogate(const TrainConfig& cfg) {
  const auto held_out = validation_strokes(cfg.brush, cfg.validation_strokes);
  std::vector<AblationRow> rows;
  for (auto v : {SurrogateVariant::kRasterOnly, SurrogateVariant::kShadingOnly,
                 SurrogateVariant::kDual}) {
    const TrainResult r = train_surrogate(v, cfg);
    rows.push_back({v, evaluate_surrogate(r.model, held_out)});
  }
  return rows;
}

namespace {

constexpr std::array<char, 8> kCheckpointMagic{'B', 'W', 'S', 'U', 'R', 'R', 'O', 'G'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> bytes{static_cast<unsigned char>(v),
                                           static_cast<unsigned char>(v >> 8),
                                           static_cast<unsigned char>(v >> 16),
                                           static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes.data()), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 4))
    throw std::runtime_error("checkpoint: truncated file");
  return bytes[0] | (bytes[1] << 8) | (bytes[2] << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_floats(std::ostream& out, const float* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, data + i, 4);
    put_u32(out, bits);
  }
}

void get_floats(std::istream& in, float* data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint32_t bits = get_u32(in);
    std::memcpy(data + i, &bits, 4);
  }
}

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void write_net(std::ostream& out, const DenseNet<float>& net) {
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (const auto& l : net.layers) {
    put_u32(out, static_cast<std::uint32_t>(l.weight.rows()));
    put_u32(out, static_cast<std::uint32_t>(l.weight.cols()));
    const RowMatrixF w = l.weight;
    put_floats(out, w.data(), w.size());
    put_floats(out, l.bias.data(), l.bias.size());
  }
}

DenseNet<float> read_net(std::istream& in) {
  DenseNet<float> net;
  const std::uint32_t count = get_u32(in);
  if (count == 0 || count > 64) throw std::runtime_error("checkpoint: bad layer count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t rows = get_u32(in), cols = get_u32(in);
    if (rows == 0 || cols == 0 || rows > (1u << 16) || cols > (1u << 16))
      throw std::runtime_error("checkpoint: bad layer shape");
    if (!net.layers.empty() && net.layers.back().weight.rows() != cols)
      throw std::runtime_error("checkpoint: layer sizes do not chain");
    RowMatrixF w(rows, cols);
    get_floats(in, w.data(), w.size());
    DenseNet<float>::Vector b(rows);
    get_floats(in, b.data(), b.size());
    net.layers.push_back({w, b});
  }
  return net;
}

}  // namespace

void save_checkpoint(const SurrogateModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(model.variant));
  put_u32(out, static_cast<std::uint32_t>(model.brush));
  put_u32(out, static_cast<std::uint32_t>(model.resolution));
  put_u32(out, model.g_s ? 1 : 0);
  put_u32(out, model.g_r ? 1 : 0);
  if (model.g_s) write_net(out, *model.g_s);
  if (model.g_r) write_net(out, *model.g_r);
  if (!out.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

SurrogateModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
    throw std::runtime_error("checkpoint: not a surrogate checkpoint");
  if (get_u32(in) != kCheckpointVersion) throw std::runtime_error("checkpoint: unsupported version");
  SurrogateModel m;
  const std::uint32_t variant = get_u32(in), brush = get_u32(in);
  if (variant > 2 || brush > 3) throw std::runtime_error("checkpoint: bad header");
  m.variant = static_cast<SurrogateVariant>(variant);
  m.brush = static_cast<BrushType>(brush);
  m.resolution = static_cast<int>(get_u32(in));
  if (m.resolution != kSurrogateResolution) throw std::runtime_error("checkpoint: bad resolution");
  const bool has_s = get_u32(in) != 0, has_r = get_u32(in) != 0;
  if (has_s != (m.variant != SurrogateVariant::kRasterOnly) ||
      has_r != (m.variant != SurrogateVariant::kShadingOnly))
    throw std::runtime_error("checkpoint: networks do not match variant");
  const int n = m.resolution * m.resolution;
  if (has_s) {
    m.g_s = read_net(in);
    if (m.g_s->input_size() != param_count(m.brush) || m.g_s->output_size() != 3 * n)
      throw std::runtime_error("checkpoint: shading network has wrong shape");
  }
  if (has_r) {
    m.g_r = read_net(in);
    if (m.g_r->input_size() != shape_param_count(m.brush) || m.g_r->output_size() != n)
      throw std::runtime_error("checkpoint: raster network has wrong shape");
  }
  return m;
}

}  // namespace brushwork
