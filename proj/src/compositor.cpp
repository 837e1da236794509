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

#include "brushwork/compositor.hpp"

#include <stdexcept>

namespace brushwork {

Canvas blend(const Canvas& canvas, const RenderOut& stroke) {
  if (!canvas.same_shape(stroke.foreground) || stroke.alpha.rows() != canvas.height() ||
      stroke.alpha.cols() != canvas.width())
    throw std::invalid_argument("blend: shape mismatch");
  Canvas out;
  for (int c = 0; c < 3; ++c)
    out[c] = stroke.alpha * stroke.foreground[c] + (1.0 - stroke.alpha) * canvas[c];
  return out;
}

Canvas render_sequence(std::span<const StrokeParams> strokes, const Canvas& initial, int resolution,
                       const SoftnessConfig& cfg, RenderMode mode) {
  if (initial.height() != resolution || initial.width() != resolution)
    throw std::invalid_argument("render_sequence: initial canvas does not match resolution");
  Canvas canvas = initial;
  for (const StrokeParams& p : strokes) {
    const RenderOut r = mode == RenderMode::kSoft ? soft_rasterize(p, resolution, cfg)
                                                  : hard_rasterize(p, resolution, cfg);
    canvas = blend(canvas, r);
  }
  return canvas;
}

std::vector<Eigen::VectorXd> sequence_vjp(std::span<const StrokeParams> strokes,
                                          const Canvas& initial, int resolution,
                                          const SoftnessConfig& cfg, const Canvas& upstream) {
  return SequenceTape(strokes, initial, resolution, cfg).backward(upstream);
}

SequenceTape::SequenceTape(std::span<const StrokeParams> strokes, const Canvas& initial,
                           int resolution, const SoftnessConfig& cfg)
    : strokes_(strokes.begin(), strokes.end()), result_(initial), resolution_(resolution),
      cfg_(cfg) {
  if (initial.height() != resolution || initial.width() != resolution)
    throw std::invalid_argument("SequenceTape: initial canvas does not match resolution");
  renders_.reserve(strokes_.size());
  below_.reserve(strokes_.size());
  for (const StrokeParams& p : strokes_) {
    below_.push_back(result_);
    renders_.push_back(soft_rasterize(p, resolution, cfg));
    result_ = blend(result_, renders_.back());
  }
}

std::vector<Eigen::VectorXd> SequenceTape::backward(const Canvas& upstream) const {
  if (!upstream.same_shape(result_))
    throw std::invalid_argument("SequenceTape::backward: upstream shape mismatch");
  std::vector<Eigen::VectorXd> grads(strokes_.size());
  Canvas g = upstream;  // d<upstream, h_T> / d h_t
  for (std::size_t k = strokes_.size(); k-- > 0;) {
    const RenderOut& r = renders_[k];
    const Canvas& below = below_[k];
    Canvas g_fg;
    PlaneD g_alpha = PlaneD::Zero(resolution_, resolution_);
    for (int c = 0; c < 3; ++c) {
      g_fg[c] = g[c] * r.alpha;
      g_alpha += g[c] * (r.foreground[c] - below[c]);
    }
    grads[k] = rasterize_vjp(strokes_[k], resolution_, cfg_, g_fg, g_alpha);
    for (int c = 0; c < 3; ++c) g[c] *= (1.0 - r.alpha);
  }
  return grads;
}

}  // namespace brushwork
