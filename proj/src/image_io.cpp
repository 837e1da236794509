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


#include "brushwork/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace brushwork {

Canvas read_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw ImageIoError("cannot read '" + path + "': " + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> pixels(PNG_IMAGE_SIZE(image));
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&image, &white, pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ImageIoError("cannot decode '" + path + "': " + image.message);
  }
  const Eigen::Index h = image.height, w = image.width;
  Canvas out(h, w);
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < w; ++j)
      for (int c = 0; c < 3; ++c) out[c](i, j) = pixels[(i * w + j) * 3 + c] / 255.0;
  return out;
}

void write_png(const Canvas& canvas, const std::string& path) {
  const Eigen::Index h = canvas.height(), w = canvas.width();
  std::vector<png_byte> pixels(static_cast<std::size_t>(h * w * 3));
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < w; ++j)
      for (int c = 0; c < 3; ++c)
        pixels[(i * w + j) * 3 + c] =
            static_cast<png_byte>(std::lround(std::clamp(canvas[c](i, j), 0.0, 1.0) * 255.0));
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr))
    throw ImageIoError("cannot write '" + path + "': " + image.message);
}

Canvas make_square(const Canvas& image, bool letterbox, const Rgb& fill) {
  const Eigen::Index h = image.height(), w = image.width();
  if (h == w) return image;
  Canvas out;
  if (letterbox) {
    const Eigen::Index side = std::max(h, w);
    out = Canvas::filled(side, side, fill);
    for (int c = 0; c < 3; ++c) out[c].block((side - h) / 2, (side - w) / 2, h, w) = image[c];
  } else {
    const Eigen::Index side = std::min(h, w);
    for (int c = 0; c < 3; ++c) out[c] = image[c].block((h - side) / 2, (w - side) / 2, side, side);
  }
  return out;
}

Canvas prepare_reference(const Canvas& image, int resolution, bool letterbox) {
  const Canvas square = make_square(image, letterbox);
  return area_resize(square, resolution, resolution);
}

}  // namespace brushwork
