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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "brushwork/compositor.hpp"
#include "brushwork/image.hpp"
#include "brushwork/losses.hpp"
#include "brushwork/rasterizer.hpp"
#include "brushwork/stroke_model.hpp"

namespace brushwork {

inline constexpr std::string_view kDocumentFormatVersion = "brushwork.paint/1";

/// Echo of the configuration that produced a painting.
struct Provenance {
  std::uint64_t seed = 0;
  LossWeights weights;
  std::vector<int> scales;
  double sharpness = SoftnessConfig{}.sharpness;

  bool operator==(const Provenance& other) const {
    return seed == other.seed && weights.beta_l1 == other.weights.beta_l1 &&
           weights.beta_ot == other.weights.beta_ot && scales == other.scales &&
           sharpness == other.sharpness;
  }
};

/// A resolution-independent painting: strokes in paint order over a flat
/// background.
struct PaintingDocument {
  std::string format_version{kDocumentFormatVersion};
  BrushType brush = BrushType::kOilPaint;
  Rgb background = Rgb::Ones();
  int aspect_width = 1;
  int aspect_height = 1;
  std::vector<Eigen::VectorXd> strokes;
  Provenance provenance;

  StrokeParams stroke(std::size_t i) const { return {brush, strokes.at(i)}; }
  std::vector<StrokeParams> stroke_params() const;
  SoftnessConfig softness() const;

  bool operator==(const PaintingDocument& other) const;
};

/// Malformed or invalid document content.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws DocumentError when an invariant is broken.
void validate_document(const PaintingDocument& doc);

/// JSON text. Doubles are written in shortest round-trip form.
std::string export_document(const PaintingDocument& doc);
PaintingDocument import_document(std::string_view text);

void save_document(const PaintingDocument& doc, const std::string& path);
PaintingDocument load_document(const std::string& path);

/// Renders the strokes over the background at resolution x resolution.
Canvas render_document(const PaintingDocument& doc, int resolution, RenderMode mode);

}  // namespace brushwork
