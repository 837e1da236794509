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

#include "brushwork/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "brushwork/parallel.hpp"
#include "brushwork/random.hpp"

namespace brushwork {

void SoftnessConfig::validate() const {
  if (!(sharpness > 0)) throw std::invalid_argument("softness: sharpness must be positive");
  if (samples_per_curve < 16)
    throw std::invalid_argument("softness: samples_per_curve must be at least 16");
  if (reference_resolution < kMinResolution)
    throw std::invalid_argument("softness: reference resolution too small");
}

StreakTexture StreakTexture::from_seed(std::uint64_t seed) {
  Rng rng(seed);
  StreakTexture tex;
  double total = 0;
  for (int k = 0; k < kTerms; ++k) {
    tex.frequency[k] = rng.uniform(3.0, 9.0) * std::numbers::pi;
    tex.phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    tex.weight[k] = rng.uniform(0.5, 1.0);
    total += tex.weight[k];
  }
  for (double& w : tex.weight) w /= total;
  return tex;
}

const StreakTexture& StreakTexture::standard() {
  static const StreakTexture tex = from_seed(0x5eedULL);
  return tex;
}

double StreakTexture::value(double z, double* derivative) const {
  double g = 0, dg = 0;
  for (int k = 0; k < kTerms; ++k) {
    const double arg = frequency[k] * z + phase[k];
    g += weight[k] * (0.5 + 0.5 * std::sin(arg));
    dg += weight[k] * 0.5 * frequency[k] * std::cos(arg);
  }
  if (derivative) *derivative = -amplitude * dg;
  return 1.0 - amplitude * g;
}

namespace {

// Beyond |k * sdf| = kCutoff the silhouette is below 1e-13 and is stored as
// exactly zero, which bounds the pixel footprint of each stroke.
constexpr double kCutoff = 30.0;
// Softmax terms this far below the maximum (in units of k) are dropped.
constexpr double kSoftmaxDrop = 36.0;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

struct PixelRange {
  int row_begin = 0, row_end = 0, col_begin = 0, col_end = 0;
  bool empty() const { return row_begin >= row_end || col_begin >= col_end; }
};

// Pixels whose centers lie in [xmin, xmax] x [ymin, ymax].
PixelRange covering(double xmin, double xmax, double ymin, double ymax, int res) {
  auto lo = [res](double v) {
    return std::clamp(static_cast<int>(std::ceil(v - 0.5)), 0, res);
  };
  auto hi = [res](double v) {
    return std::clamp(static_cast<int>(std::floor(v - 0.5)) + 1, 0, res);
  };
  return {lo(ymin), hi(ymax), lo(xmin), hi(xmax)};
}

// ---------------------------------------------------------------------------
// Rectangle brushes (oil paint, color tape)

struct RectSample {
  double u = 0, v = 0;
  std::array<double, 4> w{};  // softmin weights of the four half-plane distances
  double sil = 0;
  double t = 0, dt_da2 = 0, dt_dlength = 0;
  double tex = 1, dtex_dz = 0;
};

// Gradient accumulator layout.
enum RectSlot { kCx, kCy, kLen, kWid, kAng, kHead, kTail = kHead + 3, kRectSlots = kTail + 3 };

struct RectStroke {
  double cx, cy, hx, hy, cos_a, sin_a, kappa, length;
  Eigen::Vector3d head, tail;
  bool oil;
  const StreakTexture* tex;

  RectStroke(const RectGeometry& g, double k, bool is_oil)
      : cx(g.center.x()), cy(g.center.y()), hx(0.5 * g.length), hy(0.5 * g.width),
        kappa(k), length(g.length), head(g.head), tail(g.tail), oil(is_oil),
        tex(&StreakTexture::standard()) {
    const double rad = g.angle_deg * std::numbers::pi / 180.0;
    cos_a = std::cos(rad);
    sin_a = std::sin(rad);
  }

  PixelRange range(int res, double margin) const {
    const double ex = hx + margin, ey = hy + margin;
    const double half_w = std::abs(cos_a) * ex + std::abs(sin_a) * ey;
    const double half_h = std::abs(sin_a) * ex + std::abs(cos_a) * ey;
    return covering(cx - half_w, cx + half_w, cy - half_h, cy + half_h, res);
  }

  void local(double px, double py, double& u, double& v) const {
    const double dx = px - cx, dy = py - cy;
    u = cos_a * dx + sin_a * dy;
    v = -sin_a * dx + cos_a * dy;
  }

  void eval(double px, double py, RectSample& s) const {
    local(px, py, s.u, s.v);
    const std::array<double, 4> a = {hx - s.u, hx + s.u, hy - s.v, hy + s.v};
    const double m = *std::min_element(a.begin(), a.end());
    double total = 0;
    for (int k = 0; k < 4; ++k) {
      s.w[k] = std::exp(-kappa * (a[k] - m));
      total += s.w[k];
    }
    for (double& w : s.w) w /= total;
    const double sdf = m - std::log(total) / kappa;
    s.sil = sigmoid(kappa * sdf);
    if (oil) {
      // Smoothly clamped position along the stroke, 0 at the head edge.
      const double a2 = a[1];
      const double sp_head = softplus(kappa * a2) / kappa;
      const double sp_tail = softplus(kappa * (a2 - length)) / kappa;
      s.t = (sp_head - sp_tail) / length;
      const double sg_head = sigmoid(kappa * a2);
      const double sg_tail = sigmoid(kappa * (a2 - length));
      s.dt_da2 = (sg_head - sg_tail) / length;
      s.dt_dlength = (sg_tail - s.t) / length;
      s.tex = tex->value(s.v / hy, &s.dtex_dz);
    }
  }

  Eigen::Vector3d color(double t) const { return head + (tail - head) * t; }
};

// ---------------------------------------------------------------------------
// Curve brushes (marker pen, watercolor)

struct CurveStroke {
  std::vector<Eigen::Vector2d> centers;
  std::vector<double> radius;
  std::vector<double> tpos;
  double kappa = 1, eta = 1, alpha = 1;
  Eigen::Vector3d head, tail;
  double r0 = 0, r2 = 0;

  CurveStroke(const CurveGeometry& g, int samples, double k)
      : kappa(k), eta(1.0 / k), alpha(g.alpha), head(g.head), tail(g.tail), r0(g.r0), r2(g.r2) {
    centers.reserve(samples);
    for (int i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / (samples - 1);
      tpos.push_back(t);
      centers.push_back(bezier_point(g.p0, g.p1, g.p2, t));
      radius.push_back(g.r0 + (g.r2 - g.r0) * t);
    }
  }

  int samples() const { return static_cast<int>(centers.size()); }

  PixelRange range(int res, double margin) const {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int k = 0; k < samples(); ++k) {
      const double r = radius[k] + margin;
      xmin = std::min(xmin, centers[k].x() - r);
      xmax = std::max(xmax, centers[k].x() + r);
      ymin = std::min(ymin, centers[k].y() - r);
      ymax = std::max(ymax, centers[k].y() + r);
    }
    return covering(xmin, xmax, ymin, ymax, res);
  }

  double soft_margin() const { return (kCutoff + std::log(samples())) / kappa; }
};

// Scratch space for one pixel of a curve stroke.
struct CurveSample {
  std::vector<double> excess;  // r_k - dist_k
  std::vector<double> dist;
  std::vector<double> weight;  // normalized softmax weights, 0 if dropped
  double sil = 0, tau = 0;
  explicit CurveSample(int n) : excess(n), dist(n), weight(n) {}
};

void eval_curve(const CurveStroke& st, double px, double py, CurveSample& s) {
  const int n = st.samples();
  double best = -1e300;
  for (int k = 0; k < n; ++k) {
    const double dx = px - st.centers[k].x(), dy = py - st.centers[k].y();
    s.dist[k] = std::sqrt(dx * dx + dy * dy + st.eta * st.eta);
    s.excess[k] = st.radius[k] - s.dist[k];
    best = std::max(best, s.excess[k]);
  }
  double total = 0, tsum = 0;
  for (int k = 0; k < n; ++k) {
    const double z = st.kappa * (s.excess[k] - best);
    const double w = z > -kSoftmaxDrop ? std::exp(z) : 0.0;
    s.weight[k] = w;
    total += w;
    tsum += w * st.tpos[k];
  }
  for (int k = 0; k < n; ++k) s.weight[k] /= total;
  const double smax = best + std::log(total) / st.kappa;
  s.sil = sigmoid(st.kappa * smax);
  s.tau = tsum / total;
}

// Curve accumulator layout: per-sample center gradients, then the rest.
struct CurveSlots {
  int n;
  int r0() const { return 2 * n; }
  int r2() const { return 2 * n + 1; }
  int head() const { return 2 * n + 2; }
  int tail() const { return 2 * n + 5; }
  int alpha() const { return 2 * n + 8; }
  int size() const { return 2 * n + 9; }
};

void check_inputs(const StrokeParams& p, int resolution) {
  if (resolution < kMinResolution)
    throw std::invalid_argument("rasterize: resolution below minimum");
  if (!p.has_valid_length())
    throw std::invalid_argument("rasterize: parameter count does not match brush");
}

}  // namespace

RenderOut hard_rasterize(const StrokeParams& p, int resolution, const SoftnessConfig& cfg) {
  check_inputs(p, resolution);
  RenderOut out(resolution, resolution);
  const StrokeGeometry geom = denormalize(p, resolution);

  if (const auto* rect = std::get_if<RectGeometry>(&geom)) {
    const bool oil = p.brush == BrushType::kOilPaint;
    const RectStroke st(*rect, 1.0, oil);
    const PixelRange r = st.range(resolution, 1.0);
    parallel_rows(r.row_begin, r.row_end, [&](int i) {
      for (int j = r.col_begin; j < r.col_end; ++j) {
        double u, v;
        st.local(j + 0.5, i + 0.5, u, v);
        if (std::abs(u) > st.hx || std::abs(v) > st.hy) continue;
        Eigen::Vector3d color = st.head;
        if (oil) {
          const double t = std::clamp((u + st.hx) / st.length, 0.0, 1.0);
          color = st.color(t) * st.tex->value(v / st.hy);
        }
        for (int c = 0; c < 3; ++c) out.foreground[c](i, j) = color[c];
        out.alpha(i, j) = 1.0;
      }
    });
    return out;
  }

  const auto& curve = std::get<CurveGeometry>(geom);
  const CurveStroke st(curve, cfg.samples_per_curve, 1.0);
  const PixelRange r = st.range(resolution, 1.0);
  const bool blended = p.brush == BrushType::kWatercolor;
  parallel_rows(r.row_begin, r.row_end, [&](int i) {
    for (int j = r.col_begin; j < r.col_end; ++j) {
      const double px = j + 0.5, py = i + 0.5;
      int best_k = -1;
      double best = 0;
      for (int k = 0; k < st.samples(); ++k) {
        const double excess = st.radius[k] - (st.centers[k] - Eigen::Vector2d(px, py)).norm();
        if (excess >= 0 && (best_k < 0 || excess > best)) {
          best_k = k;
          best = excess;
        }
      }
      if (best_k < 0) continue;
      const Eigen::Vector3d color =
          blended ? Eigen::Vector3d(st.head + (st.tail - st.head) * st.tpos[best_k]) : st.head;
      for (int c = 0; c < 3; ++c) out.foreground[c](i, j) = color[c];
      out.alpha(i, j) = st.alpha;
    }
  });
  return out;
}

RenderOut soft_rasterize(const StrokeParams& p, int resolution, const SoftnessConfig& cfg) {
  check_inputs(p, resolution);
  cfg.validate();
  RenderOut out(resolution, resolution);
  const StrokeGeometry geom = denormalize(p, resolution);
  const double kappa = cfg.pixel_sharpness(resolution);

  if (const auto* rect = std::get_if<RectGeometry>(&geom)) {
    const RectStroke st(*rect, kappa, p.brush == BrushType::kOilPaint);
    const PixelRange r = st.range(resolution, kCutoff / kappa);
    parallel_rows(r.row_begin, r.row_end, [&](int i) {
      RectSample s;
      for (int j = r.col_begin; j < r.col_end; ++j) {
        st.eval(j + 0.5, i + 0.5, s);
        const Eigen::Vector3d color = st.oil ? Eigen::Vector3d(st.color(s.t) * s.tex) : st.head;
        for (int c = 0; c < 3; ++c) out.foreground[c](i, j) = color[c] * s.sil;
        out.alpha(i, j) = s.sil;
      }
    });
    return out;
  }

  const CurveStroke st(std::get<CurveGeometry>(geom), cfg.samples_per_curve, kappa);
  const PixelRange r = st.range(resolution, st.soft_margin());
  parallel_rows(r.row_begin, r.row_end, [&](int i) {
    CurveSample s(st.samples());
    for (int j = r.col_begin; j < r.col_end; ++j) {
      eval_curve(st, j + 0.5, i + 0.5, s);
      const Eigen::Vector3d color = st.head + (st.tail - st.head) * s.tau;
      for (int c = 0; c < 3; ++c) out.foreground[c](i, j) = color[c] * s.sil;
      out.alpha(i, j) = st.alpha * s.sil;
    }
  });
  return out;
}

Eigen::VectorXd rasterize_vjp(const StrokeParams& p, int resolution, const SoftnessConfig& cfg,
                              const Canvas& upstream_foreground, const PlaneD& upstream_alpha) {
  check_inputs(p, resolution);
  cfg.validate();
  if (upstream_foreground.height() != resolution || upstream_foreground.width() != resolution ||
      upstream_alpha.rows() != resolution || upstream_alpha.cols() != resolution)
    throw std::invalid_argument("rasterize_vjp: upstream shape mismatch");

  const StrokeGeometry geom = denormalize(p, resolution);
  const double kappa = cfg.pixel_sharpness(resolution);
  const double res = resolution;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.values.size());

  if (const auto* rect = std::get_if<RectGeometry>(&geom)) {
    const bool oil = p.brush == BrushType::kOilPaint;
    const RectStroke st(*rect, kappa, oil);
    const PixelRange r = st.range(resolution, kCutoff / kappa);
    if (r.empty()) return grad;
    const int rows = r.row_end - r.row_begin;
    Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(kRectSlots, rows);

    parallel_rows(r.row_begin, r.row_end, [&](int i) {
      auto acc = partial.col(i - r.row_begin);
      RectSample s;
      for (int j = r.col_begin; j < r.col_end; ++j) {
        const Eigen::Vector3d gfg(upstream_foreground[0](i, j), upstream_foreground[1](i, j),
                                  upstream_foreground[2](i, j));
        const double galpha = upstream_alpha(i, j);
        if (gfg.isZero(0.0) && galpha == 0.0) continue;
        st.eval(j + 0.5, i + 0.5, s);

        double gsil = galpha, gt = 0, gtex = 0;
        if (oil) {
          const Eigen::Vector3d color = st.color(s.t);
          gsil += gfg.dot(color) * s.tex;
          gtex = gfg.dot(color) * s.sil;
          gt = gfg.dot(st.tail - st.head) * s.tex * s.sil;
          acc.segment<3>(kHead) += gfg * (s.tex * s.sil * (1.0 - s.t));
          acc.segment<3>(kTail) += gfg * (s.tex * s.sil * s.t);
        } else {
          gsil += gfg.dot(st.head);
          acc.segment<3>(kHead) += gfg * s.sil;
        }
        const double gsdf = gsil * kappa * s.sil * (1.0 - s.sil);
        const std::array<double, 4> ga = {gsdf * s.w[0], gsdf * s.w[1], gsdf * s.w[2],
                                          gsdf * s.w[3]};
        const double gu = -ga[0] + ga[1] + gt * s.dt_da2;
        const double gv = -ga[2] + ga[3] + gtex * s.dtex_dz / st.hy;
        const double ghx = ga[0] + ga[1] + gt * s.dt_da2;
        const double ghy = ga[2] + ga[3] - gtex * s.dtex_dz * s.v / (st.hy * st.hy);
        acc[kLen] += 0.5 * ghx + gt * s.dt_dlength;
        acc[kWid] += 0.5 * ghy;
        acc[kCx] += -gu * st.cos_a + gv * st.sin_a;
        acc[kCy] += -gu * st.sin_a - gv * st.cos_a;
        acc[kAng] += gu * s.v - gv * s.u;
      }
    });

    Eigen::VectorXd total = Eigen::VectorXd::Zero(kRectSlots);
    for (int k = 0; k < rows; ++k) total += partial.col(k);

    using namespace rect_param;
    grad[kX] = total[kCx] * res;
    grad[kY] = total[kCy] * res;
    grad[kLength] = total[kLen] * rect->length_slope * res;
    grad[kWidth] = total[kWid] * rect->width_slope * res;
    grad[kAngle] = total[kAng] * std::numbers::pi;
    if (oil) {
      grad.segment<3>(kHeadColor) = total.segment<3>(kHead);
      grad.segment<3>(kTailColor) = total.segment<3>(kTail);
    } else {
      grad.segment<3>(kHeadColor) = total.segment<3>(kHead);
    }
    return grad;
  }

  const auto& curve = std::get<CurveGeometry>(geom);
  const CurveStroke st(curve, cfg.samples_per_curve, kappa);
  const PixelRange r = st.range(resolution, st.soft_margin());
  if (r.empty()) return grad;
  const int n = st.samples();
  const CurveSlots slots{n};
  const int rows = r.row_end - r.row_begin;
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(slots.size(), rows);

  parallel_rows(r.row_begin, r.row_end, [&](int i) {
    auto acc = partial.col(i - r.row_begin);
    CurveSample s(n);
    for (int j = r.col_begin; j < r.col_end; ++j) {
      const Eigen::Vector3d gfg(upstream_foreground[0](i, j), upstream_foreground[1](i, j),
                                upstream_foreground[2](i, j));
      const double galpha = upstream_alpha(i, j);
      if (gfg.isZero(0.0) && galpha == 0.0) continue;
      const double px = j + 0.5, py = i + 0.5;
      eval_curve(st, px, py, s);
      const Eigen::Vector3d color = st.head + (st.tail - st.head) * s.tau;
      const double gsil = gfg.dot(color) + galpha * st.alpha;
      acc[slots.alpha()] += galpha * s.sil;
      const double gtau = gfg.dot(st.tail - st.head) * s.sil;
      acc.segment<3>(slots.head()) += gfg * (s.sil * (1.0 - s.tau));
      acc.segment<3>(slots.tail()) += gfg * (s.sil * s.tau);
      const double gsmax = gsil * kappa * s.sil * (1.0 - s.sil);
      for (int k = 0; k < n; ++k) {
        const double w = s.weight[k];
        if (w == 0.0) continue;
        const double ge = gsmax * w + gtau * kappa * w * (st.tpos[k] - s.tau);
        acc[slots.r0()] += ge * (1.0 - st.tpos[k]);
        acc[slots.r2()] += ge * st.tpos[k];
        const double scale = ge / s.dist[k];
        acc[2 * k] += scale * (px - st.centers[k].x());
        acc[2 * k + 1] += scale * (py - st.centers[k].y());
      }
    }
  });

  Eigen::VectorXd total = Eigen::VectorXd::Zero(slots.size());
  for (int k = 0; k < rows; ++k) total += partial.col(k);

  Eigen::Vector2d g0 = Eigen::Vector2d::Zero(), g1 = Eigen::Vector2d::Zero(),
                  g2 = Eigen::Vector2d::Zero();
  for (int k = 0; k < n; ++k) {
    const double t = st.tpos[k], s = 1.0 - t;
    const Eigen::Vector2d gb(total[2 * k], total[2 * k + 1]);
    g0 += gb * (s * s);
    g1 += gb * (2.0 * s * t);
    g2 += gb * (t * t);
  }
  using namespace curve_param;
  grad.segment<2>(kX0) = g0 * res;
  grad.segment<2>(kX1) = g1 * res;
  grad.segment<2>(kX2) = g2 * res;
  if (p.brush == BrushType::kMarkerPen) {
    grad[kThickness] = (total[slots.r0()] + total[slots.r2()]) * curve.r0_slope * res;
    grad.segment<3>(kMarkerColor) =
        total.segment<3>(slots.head()) + total.segment<3>(slots.tail());
    grad[kMarkerAlpha] = total[slots.alpha()];
  } else {
    grad[kRadius0] = total[slots.r0()] * curve.r0_slope * res;
    grad[kRadius2] = total[slots.r2()] * curve.r2_slope * res;
    grad.segment<3>(kHeadColor) = total.segment<3>(slots.head());
    grad.segment<3>(kTailColor) = total.segment<3>(slots.tail());
    grad[kWatercolorAlpha] = total[slots.alpha()];
  }
  return grad;
}

}  // namespace brushwork
