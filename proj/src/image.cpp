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

#include "brushwork/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brushwork {

Eigen::MatrixXd area_resample_matrix(int src_size, int dst_size) {
  if (src_size <= 0 || dst_size <= 0)
    throw std::invalid_argument("area_resample_matrix: sizes must be positive");
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(dst_size, src_size);
  const double scale = static_cast<double>(src_size) / dst_size;
  for (int i = 0; i < dst_size; ++i) {
    const double lo = i * scale;
    const double hi = (i + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(src_size - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int j = first; j <= last; ++j) {
      const double overlap = std::min(hi, j + 1.0) - std::max(lo, static_cast<double>(j));
      if (overlap > 0) weights(i, j) = overlap / scale;
    }
  }
  return weights;
}

PlaneD area_resize(const PlaneD& src, int height, int width) {
  if (src.rows() == height && src.cols() == width) return src;
  const Eigen::MatrixXd rows = area_resample_matrix(static_cast<int>(src.rows()), height);
  const Eigen::MatrixXd cols = area_resample_matrix(static_cast<int>(src.cols()), width);
  PlaneD out = (rows * src.matrix() * cols.transpose()).array();
  return out;
}

Canvas area_resize(const Canvas& src, int height, int width) {
  if (src.height() == height && src.width() == width) return src;
  const Eigen::MatrixXd rows = area_resample_matrix(static_cast<int>(src.height()), height);
  const Eigen::MatrixXd cols = area_resample_matrix(static_cast<int>(src.width()), width);
  Canvas out;
  for (int c = 0; c < 3; ++c)
    out.channel[c] = (rows * src.channel[c].matrix() * cols.transpose()).array();
  return out;
}

double mean_abs_diff(const PlaneD& a, const PlaneD& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("mean_abs_diff: shape mismatch");
  return (a - b).abs().mean();
}

double mean_abs_diff(const Canvas& a, const Canvas& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mean_abs_diff: shape mismatch");
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += (a.channel[c] - b.channel[c]).abs().sum();
  return sum / (3.0 * static_cast<double>(a.height() * a.width()));
}

}  // namespace brushwork
