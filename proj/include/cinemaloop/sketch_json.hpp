#pragma once

// Sketch document shared by the CLI and the HTTP service:
//   {"canvas":{"width":W,"height":H},
//    "strokes":[{"points":[[x,y],...],"speed_scale":s}]}
// Coordinates are pixels, origin top-left, y down; speed_scale defaults to 1.

#include <string>
#include <string_view>

#include "cinemaloop/streamline.hpp"

namespace cinemaloop {

/// Throws FormatError on malformed JSON or schema violations. Points are
/// clipped to [0, W] x [0, H]; strokes are returned as written.
MotionSketchSet parse_sketch_json(std::string_view text);
std::string to_sketch_json(const MotionSketchSet& sketches);

/// Runs prepare_motion_stroke over every stroke.
MotionSketchSet prepare_sketches(const MotionSketchSet& sketches);

}  // namespace cinemaloop
