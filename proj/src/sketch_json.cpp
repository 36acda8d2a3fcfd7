#include "cinemaloop/sketch_json.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace cinemaloop {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) throw FormatError(std::string("sketch json: missing \"") + key + "\" in " + where);
  return obj.at(key);
}

double finite_number(const json& v, const char* what) {
  if (!v.is_number()) throw FormatError(std::string("sketch json: ") + what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(std::string("sketch json: ") + what + " must be finite");
  return d;
}

}  // namespace

MotionSketchSet parse_sketch_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("sketch json: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("sketch json: document must be an object");

  const json& canvas = require(doc, "canvas", "document");
  const json& w = require(canvas, "width", "canvas");
  const json& h = require(canvas, "height", "canvas");
  if (!w.is_number_integer() || !h.is_number_integer() || w.get<long long>() < 1 || h.get<long long>() < 1 ||
      w.get<long long>() > (1 << 20) || h.get<long long>() > (1 << 20))
    throw FormatError("sketch json: canvas width/height must be positive integers");

  MotionSketchSet set;
  set.canvas = {static_cast<int>(w.get<long long>()), static_cast<int>(h.get<long long>())};

  const json& strokes = require(doc, "strokes", "document");
  if (!strokes.is_array()) throw FormatError("sketch json: \"strokes\" must be an array");
  for (const json& s : strokes) {
    const json& points = require(s, "points", "stroke");
    if (!points.is_array()) throw FormatError("sketch json: \"points\" must be an array");
    MotionStroke stroke;
    if (s.contains("speed_scale")) {
      stroke.speed_scale = finite_number(s.at("speed_scale"), "speed_scale");
      if (!(stroke.speed_scale > 0.0)) throw FormatError("sketch json: speed_scale must be positive");
    }
    for (const json& p : points) {
      if (!p.is_array() || p.size() != 2) throw FormatError("sketch json: each point must be [x, y]");
      const double x = finite_number(p[0], "point x");
      const double y = finite_number(p[1], "point y");
      stroke.points.push_back({std::clamp(x, 0.0, static_cast<double>(set.canvas.width)),
                               std::clamp(y, 0.0, static_cast<double>(set.canvas.height))});
    }
    set.strokes.push_back(std::move(stroke));
  }
  return set;
}

std::string to_sketch_json(const MotionSketchSet& sketches) {
  json strokes = json::array();
  for (const auto& s : sketches.strokes) {
    json points = json::array();
    for (const auto& p : s.points) points.push_back({p.x, p.y});
    strokes.push_back({{"points", std::move(points)}, {"speed_scale", s.speed_scale}});
  }
  const json doc = {{"canvas", {{"width", sketches.canvas.width}, {"height", sketches.canvas.height}}},
                    {"strokes", std::move(strokes)}};
  return doc.dump();
}

MotionSketchSet prepare_sketches(const MotionSketchSet& sketches) {
  MotionSketchSet out;
  out.canvas = sketches.canvas;
  out.strokes.reserve(sketches.strokes.size());
  for (const auto& s : sketches.strokes) out.strokes.push_back(prepare_motion_stroke(s));
  return out;
}

}  // namespace cinemaloop
