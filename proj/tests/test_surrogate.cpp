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


#include <cstdio>
#include <filesystem>
#include <fstream>

#include "brushwork/surrogate.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace brushwork;

namespace {

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.strokes_per_epoch = 1024;
  cfg.batch_size = 32;
  cfg.learning_rate = 1e-3;
  cfg.shading_hidden = 128;
  cfg.raster_hidden = 96;
  cfg.hidden_layers = 2;
  cfg.validation_strokes = 64;
  cfg.seed = 3;
  return cfg;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("brushwork_test_" + name);
}

}  // namespace

TEST_CASE("psnr") {
  const PlaneD a = testing::smooth_plane(8, 8, 1, 0, 1);
  CHECK(psnr(a, a) == 100.0);
  CHECK(psnr(PlaneD::Zero(4, 4), PlaneD::Constant(4, 4, 0.1)) == doctest::Approx(20.0));
  CHECK(psnr(PlaneD::Zero(4, 4), PlaneD::Ones(4, 4)) == doctest::Approx(0.0));
  CHECK(psnr(Canvas(4, 4, 0.0), Canvas(4, 4, 0.1)) == doctest::Approx(20.0));
  CHECK_THROWS_AS(psnr(PlaneD::Zero(4, 4), PlaneD::Zero(4, 5)), std::invalid_argument);
}

TEST_CASE("variant tags") {
  for (auto v : {SurrogateVariant::kRasterOnly, SurrogateVariant::kShadingOnly, SurrogateVariant::kDual})
    CHECK(variant_from_tag(variant_tag(v)) == v);
  CHECK_FALSE(variant_from_tag("both").has_value());
}

TEST_CASE("network shapes and output range") {
  const DenseNet<double> net({5, 7, 3}, 1);
  REQUIRE(net.layers.size() == 2);
  CHECK(net.layers[0].weight.rows() == 7);
  CHECK(net.layers[0].weight.cols() == 5);
  CHECK(net.layers[1].weight.rows() == 3);
  const Eigen::MatrixXd out = net.forward(Eigen::MatrixXd::Random(5, 4) * 10);
  CHECK(out.rows() == 3);
  CHECK(out.cols() == 4);
  CHECK((out.array() > 0).all());
  CHECK((out.array() < 1).all());
}

TEST_CASE("model composition per variant") {
  const auto dual = SurrogateModel::create(SurrogateVariant::kDual, BrushType::kOilPaint, 16, 16, 1, 1);
  CHECK(dual.g_s.has_value());
  CHECK(dual.g_r.has_value());
  const auto raster = SurrogateModel::create(SurrogateVariant::kRasterOnly, BrushType::kOilPaint, 16, 16, 1, 1);
  CHECK_FALSE(raster.g_s.has_value());
  CHECK(raster.g_r.has_value());
  const auto shading = SurrogateModel::create(SurrogateVariant::kShadingOnly, BrushType::kOilPaint, 16, 16, 1, 1);
  CHECK(shading.g_s.has_value());
  CHECK_FALSE(shading.g_r.has_value());

  const RenderOut r = raster.forward(sample_random_stroke(BrushType::kOilPaint, 2));
  CHECK(r.alpha.rows() == kSurrogateResolution);
  CHECK((r.foreground[0] == r.foreground[1]).all());
  CHECK((r.foreground[0].cast<float>() == r.alpha.cast<float>()).all());
  const RenderOut s = shading.forward(sample_random_stroke(BrushType::kOilPaint, 2));
  CHECK((s.alpha - (s.foreground[0] + s.foreground[1] + s.foreground[2]) / 3).abs().maxCoeff() < 1e-6);
  CHECK_THROWS_AS(dual.forward(sample_random_stroke(BrushType::kColorTape, 2)), std::invalid_argument);
}

TEST_CASE("zero silhouette masks everything") {
  using M = DenseNet<double>::Matrix;
  const int n = 4;
  const M shading = M::Constant(3 * n, 2, 0.7), silhouette = M::Zero(n, 2);
  Eigen::RowVector2d a(1.0, 0.5);
  const auto pred = compose_prediction<double>(SurrogateVariant::kDual, &shading, &silhouette, a);
  CHECK(pred.foreground.cwiseAbs().maxCoeff() == 0.0);
  CHECK(pred.alpha.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero transparency gives zero alpha") {
  const auto model = SurrogateModel::create(SurrogateVariant::kDual, BrushType::kMarkerPen, 16, 16, 1, 4);
  StrokeParams p = sample_random_stroke(BrushType::kMarkerPen, 6);
  p.values[curve_param::kMarkerAlpha] = 0;
  CHECK(model.forward(p).alpha.abs().maxCoeff() == 0.0);
}

TEST_CASE("silhouette ignores color") {
  const auto model = SurrogateModel::create(SurrogateVariant::kDual, BrushType::kOilPaint, 32, 32, 2, 5);
  StrokeParams p = sample_random_stroke(BrushType::kOilPaint, 8);
  const PlaneD before = model.forward(p).alpha;
  for (int k = rect_param::kHeadColor; k < param_count(BrushType::kOilPaint); ++k) p.values[k] = 1 - p.values[k];
  CHECK((model.forward(p).alpha == before).all());
}

TEST_CASE("regression loss is nonnegative and vanishes on exact targets") {
  const DenseNet<double> gs({11, 8, 3 * kSurrogateResolution * kSurrogateResolution}, 1);
  const DenseNet<double> gr({5, 8, kSurrogateResolution * kSurrogateResolution}, 2);
  std::vector<StrokeParams> strokes;
  for (int i = 0; i < 3; ++i) strokes.push_back(sample_random_stroke(BrushType::kOilPaint, i));
  auto batch = make_batch<double>(strokes);
  CHECK(surrogate_loss<double>(SurrogateVariant::kDual, &gs, &gr, batch) > 0);
  const auto shading = gs.forward(batch.params), silhouette = gr.forward(batch.shape_params);
  const auto pred = compose_prediction<double>(SurrogateVariant::kDual, &shading, &silhouette, batch.transparency);
  batch.target_fg = pred.foreground;
  batch.target_alpha = pred.alpha;
  CHECK(surrogate_loss<double>(SurrogateVariant::kDual, &gs, &gr, batch) == 0.0);
  CHECK_THROWS_AS(surrogate_loss<double>(SurrogateVariant::kDual, &gs, nullptr, batch), std::invalid_argument);
}

TEST_CASE("network gradients match central differences") {
  for (auto v : {SurrogateVariant::kRasterOnly, SurrogateVariant::kShadingOnly, SurrogateVariant::kDual}) {
    CAPTURE(variant_tag(v));
    const auto rep = testing::check_surrogate_gradient(v, BrushType::kOilPaint, 11);
    CHECK(rep.checked > 100);
    CHECK(rep.worst < 1e-3);
  }
}

TEST_CASE("training improves and is deterministic") {
  const TrainConfig cfg = small_config();
  const TrainResult a = train_surrogate(SurrogateVariant::kDual, cfg);
  REQUIRE(a.validation_psnr.size() == 6);
  MESSAGE("validation psnr first " << a.validation_psnr.front() << " last " << a.validation_psnr.back());
  CHECK(a.validation_psnr.back() >= a.validation_psnr.front() + 3.0);

  const std::size_t tenth = a.batch_loss.size() / 10;
  double head = 0, tail = 0;
  for (std::size_t i = 0; i < tenth; ++i) {
    head += a.batch_loss[i];
    tail += a.batch_loss[a.batch_loss.size() - 1 - i];
  }
  CHECK(tail < head);

  const TrainResult b = train_surrogate(SurrogateVariant::kDual, cfg);
  CHECK(a.validation_psnr == b.validation_psnr);
  CHECK(a.batch_loss == b.batch_loss);

}

TEST_CASE("trained dual model tracks the hard alpha") {
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.strokes_per_epoch = 3200;
  cfg.validation_strokes = 64;
  cfg.seed = 4;
  const TrainResult r = train_surrogate(SurrogateVariant::kDual, cfg);
  double mae = 0;
  const int count = 64;
  for (int i = 0; i < count; ++i) {
    const StrokeParams p = sample_random_stroke(BrushType::kOilPaint, 5000 + i);
    mae += mean_abs_diff(r.model.forward(p).alpha, hard_rasterize(p, kSurrogateResolution).alpha);
  }
  MESSAGE("alpha mean absolute error " << mae / count);
  CHECK(mae / count < 0.15);
}

TEST_CASE("memorizes a single stroke") {
  TrainConfig cfg = small_config();
  cfg.epochs = 10;
  cfg.batch_size = 8;
  cfg.strokes_per_epoch = 1600;  // 2000 optimizer steps in total
  const std::vector<StrokeParams> one{sample_random_stroke(BrushType::kOilPaint, 42)};
  const TrainResult r = train_surrogate(SurrogateVariant::kDual, cfg, one);
  CHECK(r.batch_loss.size() == 2000);
  const SurrogateScore score = evaluate_surrogate(r.model, one);
  MESSAGE("memorized psnr " << score.mean_psnr);
  CHECK(score.mean_psnr > 30.0);
}

TEST_CASE("checkpoint round trip") {
  const auto model = SurrogateModel::create(SurrogateVariant::kDual, BrushType::kWatercolor, 24, 16, 2, 9);
  const auto path = temp_file("model.ckpt");
  save_checkpoint(model, path.string());
  const SurrogateModel loaded = load_checkpoint(path.string());
  CHECK(loaded.variant == model.variant);
  CHECK(loaded.brush == model.brush);
  const StrokeParams p = sample_random_stroke(BrushType::kWatercolor, 1);
  const RenderOut a = model.forward(p), b = loaded.forward(p);
  CHECK(a.foreground == b.foreground);
  CHECK((a.alpha == b.alpha).all());

  std::ofstream(path, std::ios::binary) << "NOTACKPT";
  CHECK_THROWS(load_checkpoint(path.string()));
  std::filesystem::remove(path);
  CHECK_THROWS(load_checkpoint(path.string()));
}

TEST_CASE("validation strokes are fixed per brush") {
  CHECK(validation_strokes(BrushType::kOilPaint, 16) == validation_strokes(BrushType::kOilPaint, 16));
  CHECK_FALSE(validation_strokes(BrushType::kOilPaint, 4)[0].values.size() ==
              validation_strokes(BrushType::kWatercolor, 4)[0].values.size());
}

TEST_CASE("train configuration validation") {
  TrainConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_NOTHROW(TrainConfig{}.validate());
}
