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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "brushwork/compositor.hpp"
#include "brushwork/image.hpp"
#include "brushwork/losses.hpp"
#include "brushwork/random.hpp"
#include "brushwork/rasterizer.hpp"
#include "brushwork/stroke_model.hpp"
#include "brushwork/surrogate.hpp"

namespace brushwork::testing {

inline std::string data_path(const std::string& name) {
  return std::string(BRUSHWORK_TEST_DATA_DIR) + "/" + name;
}

inline constexpr BrushType kAllBrushes[] = {BrushType::kOilPaint, BrushType::kMarkerPen,
                                            BrushType::kWatercolor, BrushType::kColorTape};

/// Relative discrepancy |a - b| / max(|a|, |b|).
inline double rel_error(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0 ? 0.0 : std::abs(a - b) / m;
}

/// Smooth random field with values in [lo, hi].
inline PlaneD smooth_plane(int h, int w, std::uint64_t seed, double lo = -1, double hi = 1) {
  Rng rng(seed);
  const double a = rng.uniform(1, 4), b = rng.uniform(1, 4), pa = rng.uniform(0, 6.3),
               pb = rng.uniform(0, 6.3), mix = rng.uniform(0.2, 0.8);
  PlaneD out(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const double x = (j + 0.5) / w, y = (i + 0.5) / h;
      const double t = mix * std::sin(a * x * 3 + pa) + (1 - mix) * std::cos(b * y * 3 + pb);
      out(i, j) = lo + (hi - lo) * 0.5 * (t + 1);
    }
  return out;
}

inline Canvas smooth_canvas(int h, int w, std::uint64_t seed, double lo = -1, double hi = 1) {
  Canvas c;
  for (int k = 0; k < 3; ++k) c[k] = smooth_plane(h, w, mix_seed(seed, k), lo, hi);
  return c;
}

inline double canvas_dot(const Canvas& a, const Canvas& b) {
  double s = 0;
  for (int c = 0; c < 3; ++c) s += (a[c] * b[c]).sum();
  return s;
}

inline double render_dot(const RenderOut& r, const Canvas& uf, const PlaneD& ua) {
  return canvas_dot(r.foreground, uf) + (r.alpha * ua).sum();
}

/// Random stroke whose sizes keep clear of the 2 px floor transition.
inline StrokeParams random_stroke(BrushType brush, std::uint64_t seed, int resolution) {
  StrokeParams p = sample_random_stroke(brush, seed);
  const double lo = 6.0 / resolution;
  auto lift = [&](int k) { p.values[k] = lo + (1 - lo) * p.values[k]; };
  if (!is_curve_brush(brush)) {
    lift(rect_param::kLength);
    lift(rect_param::kWidth);
  } else if (brush == BrushType::kMarkerPen) {
    lift(curve_param::kThickness);
  } else {
    lift(curve_param::kRadius0);
    lift(curve_param::kRadius2);
  }
  return p;
}

struct FdReport {
  double worst = 0;  // worst relative error among checked components
  int checked = 0;
  int skipped = 0;  // components with |gradient| and |fd| below the threshold
};

/// Compares rasterize_vjp against central differences of <upstream, render>.
inline FdReport check_rasterize_gradient(const StrokeParams& p, int res, const SoftnessConfig& cfg,
                                         std::uint64_t seed, double step, double threshold = 1e-6) {
  const Canvas uf = smooth_canvas(res, res, seed);
  const PlaneD ua = smooth_plane(res, res, mix_seed(seed, 9));
  const Eigen::VectorXd g = rasterize_vjp(p, res, cfg, uf, ua);
  FdReport rep;
  for (Eigen::Index k = 0; k < p.values.size(); ++k) {
    StrokeParams plus = p, minus = p;
    plus.values[k] += step;
    minus.values[k] -= step;
    const double fd = (render_dot(soft_rasterize(plus, res, cfg), uf, ua) -
                       render_dot(soft_rasterize(minus, res, cfg), uf, ua)) /
                      (2 * step);
    if (std::max(std::abs(fd), std::abs(g[k])) <= threshold) {
      ++rep.skipped;
      continue;
    }
    ++rep.checked;
    rep.worst = std::max(rep.worst, rel_error(fd, g[k]));
  }
  return rep;
}

/// Compares sequence_vjp against central differences of <upstream, h_T>.
inline FdReport check_sequence_gradient(const std::vector<StrokeParams>& strokes, int res,
                                        const SoftnessConfig& cfg, std::uint64_t seed, double step,
                                        double threshold = 1e-6) {
  const Canvas h0 = smooth_canvas(res, res, mix_seed(seed, 1), 0.2, 0.9);
  const Canvas up = smooth_canvas(res, res, mix_seed(seed, 2));
  const auto grads = sequence_vjp(strokes, h0, res, cfg, up);
  FdReport rep;
  for (std::size_t s = 0; s < strokes.size(); ++s)
    for (Eigen::Index k = 0; k < strokes[s].values.size(); ++k) {
      auto plus = strokes, minus = strokes;
      plus[s].values[k] += step;
      minus[s].values[k] -= step;
      const double fd =
          (canvas_dot(render_sequence(plus, h0, res, cfg, RenderMode::kSoft), up) -
           canvas_dot(render_sequence(minus, h0, res, cfg, RenderMode::kSoft), up)) /
          (2 * step);
      if (std::max(std::abs(fd), std::abs(grads[s][k])) <= threshold) {
        ++rep.skipped;
        continue;
      }
      ++rep.checked;
      rep.worst = std::max(rep.worst, rel_error(fd, grads[s][k]));
    }
  return rep;
}

/// Compares the OT image gradient with central differences at `samples`
/// random (pixel, channel) positions.
inline FdReport check_ot_gradient(const Canvas& canvas, const Canvas& reference,
                                  const SinkhornConfig& cfg, int samples, std::uint64_t seed,
                                  double step = 1e-4, double threshold = 1e-6) {
  const OtLoss loss(reference, cfg);
  const LossValue v = loss.evaluate(canvas);
  Rng rng(seed);
  FdReport rep;
  for (int s = 0; s < samples; ++s) {
    const auto i = static_cast<Eigen::Index>(rng.next() % canvas.height());
    const auto j = static_cast<Eigen::Index>(rng.next() % canvas.width());
    const int c = static_cast<int>(rng.next() % 3);
    Canvas plus = canvas, minus = canvas;
    plus[c](i, j) += step;
    minus[c](i, j) -= step;
    const double fd = (loss.evaluate(plus, false).value - loss.evaluate(minus, false).value) / (2 * step);
    const double g = v.gradient[c](i, j);
    if (std::max(std::abs(fd), std::abs(g)) <= threshold) {
      ++rep.skipped;
      continue;
    }
    ++rep.checked;
    rep.worst = std::max(rep.worst, rel_error(fd, g));
  }
  return rep;
}

/// Parameter gradient of the pixel regression loss for a small double
/// precision model of `variant`, against central differences on every
/// weight and bias.
inline FdReport check_surrogate_gradient(SurrogateVariant variant, BrushType brush,
                                         std::uint64_t seed, int hidden = 6, int batch = 3,
                                         double step = 1e-4, double threshold = 1e-6) {
  using Net = DenseNet<double>;
  const int n = kSurrogateResolution * kSurrogateResolution;
  std::optional<Net> gs, gr;
  if (variant != SurrogateVariant::kRasterOnly)
    gs.emplace(std::vector<int>{param_count(brush), hidden, hidden, 3 * n}, mix_seed(seed, 1));
  if (variant != SurrogateVariant::kShadingOnly)
    gr.emplace(std::vector<int>{shape_param_count(brush), hidden, n}, mix_seed(seed, 2));
  std::vector<StrokeParams> strokes;
  for (int b = 0; b < batch; ++b) strokes.push_back(sample_random_stroke(brush, mix_seed(seed, 10 + b)));
  const auto data = make_batch<double>(strokes);

  std::vector<Net::Layer> grad_s, grad_r;
  surrogate_loss<double>(variant, gs ? &*gs : nullptr, gr ? &*gr : nullptr, data, &grad_s, &grad_r);

  FdReport rep;
  auto probe = [&](Net& net, const std::vector<Net::Layer>& grads) {
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      auto visit = [&](auto& values, const auto& analytic) {
        for (Eigen::Index k = 0; k < values.size(); ++k) {
          const double saved = values.data()[k];
          values.data()[k] = saved + step;
          const double up = surrogate_loss<double>(variant, gs ? &*gs : nullptr, gr ? &*gr : nullptr, data);
          values.data()[k] = saved - step;
          const double down = surrogate_loss<double>(variant, gs ? &*gs : nullptr, gr ? &*gr : nullptr, data);
          values.data()[k] = saved;
          const double fd = (up - down) / (2 * step);
          const double g = analytic.data()[k];
          if (std::max(std::abs(fd), std::abs(g)) <= threshold) {
            ++rep.skipped;
            continue;
          }
          ++rep.checked;
          rep.worst = std::max(rep.worst, rel_error(fd, g));
        }
      };
      visit(net.layers[l].weight, grads[l].weight);
      visit(net.layers[l].bias, grads[l].bias);
    }
  };
  if (gs) probe(*gs, grad_s);
  if (gr) probe(*gr, grad_r);
  return rep;
}

}  // namespace brushwork::testing
