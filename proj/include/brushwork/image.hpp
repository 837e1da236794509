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

#include <array>

#include <Eigen/Core>

namespace brushwork {

/// Single-channel image, row-major so that (row, col) matches (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneD = Plane<double>;
using Rgb = Eigen::Vector3d;

/// Planar three-channel image. Channel c is an H x W plane.
template <typename Scalar>
struct RgbImage {
  std::array<Plane<Scalar>, 3> channel;

  RgbImage() = default;

  RgbImage(Eigen::Index height, Eigen::Index width, Scalar fill = Scalar(0)) {
    for (auto& c : channel) c = Plane<Scalar>::Constant(height, width, fill);
  }

  static RgbImage filled(Eigen::Index height, Eigen::Index width,
                         const Eigen::Matrix<Scalar, 3, 1>& rgb) {
    RgbImage img;
    for (int c = 0; c < 3; ++c)
      img.channel[c] = Plane<Scalar>::Constant(height, width, rgb[c]);
    return img;
  }

  Eigen::Index height() const { return channel[0].rows(); }
  Eigen::Index width() const { return channel[0].cols(); }

  bool same_shape(const RgbImage& other) const {
    return height() == other.height() && width() == other.width();
  }

  Plane<Scalar>& operator[](int c) { return channel[c]; }
  const Plane<Scalar>& operator[](int c) const { return channel[c]; }

  bool operator==(const RgbImage& other) const {
    if (!same_shape(other)) return false;
    for (int c = 0; c < 3; ++c)
      if (!(channel[c] == other.channel[c]).all()) return false;
    return true;
  }
};

/// The running painting state; entries are reals in [0, 1].
using Canvas = RgbImage<double>;

/// Row-stochastic (dst x src) matrix that resamples a 1D signal by exact
/// area overlap of pixel footprints. Works for both shrinking and growing.
Eigen::MatrixXd area_resample_matrix(int src_size, int dst_size);

PlaneD area_resize(const PlaneD& src, int height, int width);
Canvas area_resize(const Canvas& src, int height, int width);

/// Mean of |a - b| over every pixel and channel.
double mean_abs_diff(const Canvas& a, const Canvas& b);
double mean_abs_diff(const PlaneD& a, const PlaneD& b);

}  // namespace brushwork
