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


#include <filesystem>

#include "brushwork/document.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"

using namespace brushwork;
using nlohmann::json;

namespace {

PaintingDocument random_document(BrushType brush, int strokes, std::uint64_t seed) {
  PaintingDocument doc;
  doc.brush = brush;
  doc.background = Rgb(1.0, 0.95, 0.9);
  for (int i = 0; i < strokes; ++i) doc.strokes.push_back(sample_random_stroke(brush, mix_seed(seed, i)).values);
  doc.provenance = {seed, {1.0, 0.1}, {1, 2}, 2.0};
  return doc;
}

std::string mutate(const PaintingDocument& doc, const std::function<void(json&)>& edit) {
  json j = json::parse(export_document(doc));
  edit(j);
  return j.dump();
}

}  // namespace

TEST_CASE("export and import round trip losslessly") {
  for (BrushType b : testing::kAllBrushes) {
    PaintingDocument doc = random_document(b, 7, 3);
    doc.strokes[0][0] = 0.1 + 0.2;  // not representable in a short decimal
    doc.strokes[1][1] = 1.0 / 3.0;
    doc.aspect_width = 4;
    doc.aspect_height = 3;
    const PaintingDocument back = import_document(export_document(doc));
    CHECK(back == doc);
    CHECK(back.strokes[0][0] == 0.1 + 0.2);
    CHECK(render_document(back, 32, RenderMode::kSoft) == render_document(doc, 32, RenderMode::kSoft));
  }
}

TEST_CASE("serialized fields") {
  const json j = json::parse(export_document(random_document(BrushType::kColorTape, 2, 1)));
  CHECK(j.at("format_version") == std::string(kDocumentFormatVersion));
  CHECK(j.at("brush") == "tape");
  CHECK(j.at("strokes").size() == 2);
  CHECK(j.at("strokes")[0].size() == 8);
  CHECK(j.at("canvas_aspect") == json::array({1, 1}));
  CHECK(j.at("provenance").at("seed") == 1);
  CHECK(j.at("provenance").at("scales") == json::array({1, 2}));
}

TEST_CASE("import rejects invalid documents") {
  const PaintingDocument doc = random_document(BrushType::kOilPaint, 3, 2);
  CHECK_THROWS_AS(import_document(mutate(doc, [](json& j) { j["brush"] = "crayon"; })), DocumentError);
  CHECK_THROWS_AS(import_document(mutate(doc, [](json& j) { j["strokes"][1][4] = 1.5; })), DocumentError);
  CHECK_THROWS_AS(import_document(mutate(doc, [](json& j) { j["strokes"][0][0] = -0.01; })), DocumentError);
  CHECK_THROWS_AS(import_document(mutate(doc, [](json& j) { j["format_version"] = "brushwork.paint/99"; })),
                  DocumentError);
  CHECK_THROWS_AS(import_document(mutate(doc, [](json& j) { j["strokes"][2].erase(0); })), DocumentError);
  CHECK_THROWS_AS(import_document(mutate(doc, [](json& j) { j.erase("provenance"); })), DocumentError);
  CHECK_THROWS_AS(import_document(mutate(doc, [](json& j) { j["background"] = json::array({1, 1}); })),
                  DocumentError);
  CHECK_THROWS_AS(import_document("{\"format_version\": "), DocumentError);
  CHECK_THROWS_AS(import_document("[]"), DocumentError);
}

TEST_CASE("validation of in-memory documents") {
  PaintingDocument doc = random_document(BrushType::kMarkerPen, 2, 5);
  CHECK_NOTHROW(validate_document(doc));
  doc.strokes[0][3] = 2.0;
  CHECK_THROWS_AS(validate_document(doc), DocumentError);
  CHECK_THROWS_AS(export_document(doc), DocumentError);
}

TEST_CASE("rendering documents") {
  PaintingDocument empty;
  empty.background = Rgb(0.2, 0.3, 0.4);
  CHECK(render_document(empty, 16, RenderMode::kHard) == Canvas::filled(16, 16, Rgb(0.2, 0.3, 0.4)));
  const PaintingDocument doc = random_document(BrushType::kWatercolor, 5, 8);
  CHECK(render_document(doc, 64, RenderMode::kSoft) == render_document(doc, 64, RenderMode::kSoft));
  CHECK_THROWS_AS(render_document(doc, 4, RenderMode::kSoft), std::invalid_argument);
}

TEST_CASE("rendering is consistent across resolutions") {
  for (int d = 0; d < 10; ++d) {
    const BrushType brush = testing::kAllBrushes[d % 4];
    const PaintingDocument doc = random_document(brush, 6, 100 + d);
    const Canvas low = render_document(doc, 128, RenderMode::kSoft);
    const Canvas high = area_resize(render_document(doc, 1024, RenderMode::kSoft), 128, 128);
    const double diff = mean_abs_diff(low, high);
    CAPTURE(brush_tag(brush));
    CHECK(diff < 0.03);
  }
}

TEST_CASE("save and load") {
  const PaintingDocument doc = random_document(BrushType::kOilPaint, 4, 6);
  const auto path = std::filesystem::temp_directory_path() / "brushwork_test_doc.paint.json";
  save_document(doc, path.string());
  CHECK(load_document(path.string()) == doc);
  std::filesystem::remove(path);
  CHECK_THROWS(load_document(path.string()));
}
