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


#include "brushwork/document.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace brushwork {

using nlohmann::json;

std::vector<StrokeParams> PaintingDocument::stroke_params() const {
  std::vector<StrokeParams> out;
  out.reserve(strokes.size());
  for (const auto& v : strokes) out.push_back({brush, v});
  return out;
}

SoftnessConfig PaintingDocument::softness() const {
  SoftnessConfig cfg;
  cfg.sharpness = provenance.sharpness;
  return cfg;
}

bool PaintingDocument::operator==(const PaintingDocument& other) const {
  if (format_version != other.format_version || brush != other.brush ||
      background != other.background || aspect_width != other.aspect_width ||
      aspect_height != other.aspect_height || !(provenance == other.provenance) ||
      strokes.size() != other.strokes.size())
    return false;
  for (std::size_t i = 0; i < strokes.size(); ++i)
    if (strokes[i].size() != other.strokes[i].size() || strokes[i] != other.strokes[i])
      return false;
  return true;
}

namespace {

bool unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void validate_document(const PaintingDocument& doc) {
  if (doc.format_version != kDocumentFormatVersion)
    throw DocumentError("unsupported format_version '" + doc.format_version + "'");
  for (int c = 0; c < 3; ++c)
    if (!unit_interval(doc.background[c]))
      throw DocumentError("background color outside [0, 1]");
  if (doc.aspect_width < 1 || doc.aspect_height < 1)
    throw DocumentError("canvas_aspect must be positive");
  if (!(doc.provenance.sharpness > 0)) throw DocumentError("provenance sharpness must be positive");
  const int n = param_count(doc.brush);
  for (std::size_t i = 0; i < doc.strokes.size(); ++i) {
    const auto& v = doc.strokes[i];
    if (v.size() != n)
      throw DocumentError("stroke " + std::to_string(i) + " has " + std::to_string(v.size()) +
                          " parameters, expected " + std::to_string(n));
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (!unit_interval(v[k]))
        throw DocumentError("stroke " + std::to_string(i) + " parameter " + std::to_string(k) +
                            " outside [0, 1]");
  }
}

std::string export_document(const PaintingDocument& doc) {
  validate_document(doc);
  json strokes = json::array();
  for (const auto& v : doc.strokes) strokes.push_back(std::vector<double>(v.begin(), v.end()));
  json out = {
      {"format_version", doc.format_version},
      {"brush", std::string(brush_tag(doc.brush))},
      {"background", {doc.background[0], doc.background[1], doc.background[2]}},
      {"canvas_aspect", {doc.aspect_width, doc.aspect_height}},
      {"strokes", std::move(strokes)},
      {"provenance",
       {{"seed", doc.provenance.seed},
        {"beta_l1", doc.provenance.weights.beta_l1},
        {"beta_ot", doc.provenance.weights.beta_ot},
        {"scales", doc.provenance.scales},
        {"sharpness", doc.provenance.sharpness}}},
  };
  return out.dump(1) + "\n";
}

PaintingDocument import_document(std::string_view text) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DocumentError(std::string("malformed document: ") + e.what());
  }
  PaintingDocument doc;
  try {
    doc.format_version = in.at("format_version").get<std::string>();
    if (doc.format_version != kDocumentFormatVersion)
      throw DocumentError("unsupported format_version '" + doc.format_version + "'");
    const std::string tag = in.at("brush").get<std::string>();
    const auto brush = brush_from_tag(tag);
    if (!brush) throw DocumentError("unknown brush '" + tag + "'");
    doc.brush = *brush;

    const auto bg = in.at("background").get<std::vector<double>>();
    if (bg.size() != 3) throw DocumentError("background must have 3 components");
    doc.background = Rgb(bg[0], bg[1], bg[2]);

    const auto aspect = in.at("canvas_aspect").get<std::vector<int>>();
    if (aspect.size() != 2) throw DocumentError("canvas_aspect must be [width, height]");
    doc.aspect_width = aspect[0];
    doc.aspect_height = aspect[1];

    for (const auto& s : in.at("strokes")) {
      const auto v = s.get<std::vector<double>>();
      doc.strokes.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
    }

    const json& prov = in.at("provenance");
    doc.provenance.seed = prov.at("seed").get<std::uint64_t>();
    doc.provenance.weights.beta_l1 = prov.at("beta_l1").get<double>();
    doc.provenance.weights.beta_ot = prov.at("beta_ot").get<double>();
    doc.provenance.scales = prov.at("scales").get<std::vector<int>>();
    doc.provenance.sharpness = prov.at("sharpness").get<double>();
  } catch (const json::exception& e) {
    throw DocumentError(std::string("malformed document: ") + e.what());
  }
  validate_document(doc);
  return doc;
}

void save_document(const PaintingDocument& doc, const std::string& path) {
  const std::string text = export_document(doc);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

PaintingDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return import_document(buffer.str());
}

Canvas render_document(const PaintingDocument& doc, int resolution, RenderMode mode) {
  if (resolution < kMinResolution)
    throw std::invalid_argument("render_document: resolution below minimum");
  const std::vector<StrokeParams> strokes = doc.stroke_params();
  return render_sequence(strokes, Canvas::filled(resolution, resolution, doc.background),
                         resolution, doc.softness(), mode);
}

}  // namespace brushwork
