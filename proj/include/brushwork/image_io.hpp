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

#include <stdexcept>
#include <string>

#include "brushwork/image.hpp"

namespace brushwork {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads any PNG as RGB in [0, 1]. Transparent pixels are composited onto
/// white.
Canvas read_png(const std::string& path);

/// Writes 8-bit RGB; values are clamped to [0, 1] and rounded.
void write_png(const Canvas& image, const std::string& path);

/// Square version of `image`: the centered crop, or the whole image padded
/// with `fill` when `letterbox` is set.
Canvas make_square(const Canvas& image, bool letterbox, const Rgb& fill = Rgb::Ones());

/// make_square followed by area resampling to resolution x resolution.
Canvas prepare_reference(const Canvas& image, int resolution, bool letterbox);

}  // namespace brushwork
