#include "cinemaloop/cli.hpp"

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>

#include "CLI11.hpp"
#include "cinemaloop/file_io.hpp"
#include "cinemaloop/flow_io.hpp"
#include "cinemaloop/image_io.hpp"
#include "cinemaloop/metrics.hpp"
#include "cinemaloop/motionsynth.hpp"
#include "cinemaloop/service.hpp"
#include "cinemaloop/sketch_json.hpp"
#include "cinemaloop/splat.hpp"
#include "cinemaloop/visualize.hpp"
#include "json.hpp"

namespace cinemaloop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad option values found after parsing; reported like CLI11 errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string as_text(const std::vector<std::byte>& bytes) { return {reinterpret_cast<const char*>(bytes.data()), bytes.size()}; }

ImageU8 read_png_rgb(const fs::path& path) {
  try {
    return decode_png_rgb(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

FluidMask read_png_mask(const fs::path& path) {
  try {
    return decode_png_mask(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

MotionSketchSet read_sketches(const fs::path& path) {
  try {
    return parse_sketch_json(as_text(read_file(path)));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void require_extent(Extent expected, Extent got, const std::string& what) {
  if (expected != got)
    throw ValidationError("dimension mismatch: " + what + " is " + to_string(got) + ", expected " + to_string(expected));
}

std::optional<double> parse_radius(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double r = std::stod(text, &used);
    if (used != text.size() || !(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument(text);
    return r;
  } catch (const std::logic_error&) {
    throw UsageError("--max-rad: expected a positive number or \"auto\", got \"" + text + "\"");
  }
}

ZPolicy parse_z_policy(const std::string& text) {
  if (text == "uniform") return UniformZ{};
  if (text == "mag") return MagnitudeZ{};
  if (text.rfind("mag:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double gamma = std::stod(text.substr(4), &used);
      if (used == text.size() - 4 && std::isfinite(gamma)) return MagnitudeZ{gamma};
    } catch (const std::logic_error&) {
    }
  }
  throw UsageError("--z: expected \"uniform\" or \"mag:<gamma>\", got \"" + text + "\"");
}

json metric_value(double v) {
  // JSON has no infinity; identical images report PSNR as the string "inf".
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

struct Options {
  // visualize
  std::string flo_in, png_out, max_rad = "auto";
  // streamlines
  std::string mask_in, json_out;
  StreamlineParams stream;
  // rasterize / sketchfield
  std::string sketch_in, flo_out;
  double thickness = 3.0;
  double sigma = kDefaultSketchSigma;
  // animate
  std::string image_in, out_dir, z_policy = "uniform";
  int frames = 60;
  // metrics
  std::vector<std::string> field_pair, image_pair;
  std::string metrics_mask;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
};

int cmd_visualize(const Options& o, std::ostream&) {
  const auto radius = parse_radius(o.max_rad);
  const MotionField field = read_flo_file(o.flo_in);
  write_file_atomic(o.png_out, encode_png(visualize_flow(field, radius)));
  return kExitOk;
}

int cmd_streamlines(const Options& o, std::ostream&) {
  const MotionField field = read_flo_file(o.flo_in);
  const FluidMask mask = read_png_mask(o.mask_in);
  require_extent(field.extent(), mask.extent(), "mask " + o.mask_in);
  write_file_atomic(o.json_out, to_sketch_json(extract_streamlines(field, mask, o.stream)) + "\n");
  return kExitOk;
}

int cmd_rasterize(const Options& o, std::ostream&) {
  const MotionSketchSet sketches = prepare_sketches(read_sketches(o.sketch_in));
  write_file_atomic(o.png_out, encode_png(rasterize_sketches(sketches, o.thickness)));
  return kExitOk;
}

int cmd_sketchfield(const Options& o, std::ostream&) {
  const MotionSketchSet sketches = prepare_sketches(read_sketches(o.sketch_in));
  const FluidMask mask = read_png_mask(o.mask_in);
  require_extent(sketches.canvas, mask.extent(), "mask " + o.mask_in);
  write_file_atomic(o.flo_out, save_flo(synthesize_field(sketches, mask, o.sigma)));
  return kExitOk;
}

int cmd_animate(const Options& o, std::ostream&) {
  const ZPolicy policy = parse_z_policy(o.z_policy);
  const ImageU8 image = read_png_rgb(o.image_in);
  const FluidMask mask = read_png_mask(o.mask_in);
  const MotionField field = read_flo_file(o.flo_in);
  require_extent(image.extent(), mask.extent(), "mask " + o.mask_in);
  require_extent(image.extent(), field.extent(), "field " + o.flo_in);

  const fs::path dir = o.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(dir.string() + ": cannot create output directory");

  const FrameSequence loop = render_loop(image, field, mask, o.frames, policy);
  for (std::size_t n = 0; n < loop.frames.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.png", n);
    write_file_atomic(dir / name, encode_png(loop.frames[n]));
  }
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  if (o.field_pair.empty() && o.image_pair.empty()) throw UsageError("metrics: give --field and/or --image");

  std::optional<FluidMask> mask;
  if (!o.metrics_mask.empty()) mask = read_png_mask(o.metrics_mask);

  json report = json::object();
  if (!o.image_pair.empty()) {
    const ImageU8 a = read_png_rgb(o.image_pair[0]);
    const ImageU8 b = read_png_rgb(o.image_pair[1]);
    require_extent(a.extent(), b.extent(), "image " + o.image_pair[1]);
    report["psnr"] = metric_value(psnr(a, b));
    report["ms_ssim"] = ms_ssim(a, b);
    report["mse"] = mse(a, b);
  }
  if (!o.field_pair.empty()) {
    const MotionField f = read_flo_file(o.field_pair[0]);
    const MotionField g = read_flo_file(o.field_pair[1]);
    require_extent(f.extent(), g.extent(), "field " + o.field_pair[1]);
    if (mask) require_extent(f.extent(), mask->extent(), "mask " + o.metrics_mask);
    report["aepe"] = aepe(f, g, mask ? &*mask : nullptr);
    // with both inputs, "mse" stays the frame metric and the field one moves aside
    report[o.image_pair.empty() ? "mse" : "field_mse"] = mse(f, g);
    report["masked"] = mask.has_value();
  }
  out << report.dump() << "\n";
  return kExitOk;
}

HttpServer* g_server = nullptr;

extern "C" void stop_server(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Options& o, std::ostream& out) {
  ServiceOptions options;
  if (!o.data_dir.empty()) options.data_dir = fs::path(o.data_dir);
  SessionStore store(options);
  HttpServer server(store);
  const int port = server.bind(o.host, o.port);
  out << "cinemaloop: serving on http://" << o.host << ":" << port << "\n" << std::flush;

  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eulerian-flow loop animation from a still image and motion sketches", "cinemaloop"};
  app.require_subcommand(1);
  Options o;

  auto* vis = app.add_subcommand("visualize", "Color-wheel rendering of a .flo field");
  vis->add_option("input", o.flo_in, "Motion field (.flo)")->required();
  vis->add_option("output", o.png_out, "Output PNG")->required();
  vis->add_option("--max-rad", o.max_rad, "Normalization radius in pixels/frame, or auto")->capture_default_str();

  auto* sl = app.add_subcommand("streamlines", "Extract filtered RK4 streamlines as a sketch document");
  sl->set_help_flag("--help", "Print this help message and exit");  // frees --h for the step size
  sl->add_option("input", o.flo_in, "Motion field (.flo)")->required();
  sl->add_option("mask", o.mask_in, "Fluid mask PNG")->required();
  sl->add_option("output", o.json_out, "Output sketch JSON")->required();
  sl->add_option("--seed-spacing", o.stream.seed_spacing, "Seed grid spacing, pixels")
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 20));
  sl->add_option("--h", o.stream.step, "RK4 step size")->capture_default_str()->check(CLI::PositiveNumber);
  sl->add_option("--max-steps", o.stream.max_steps, "Steps per streamline")
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 24));
  sl->add_option("--min-speed", o.stream.min_mean_speed, "Minimum mean speed, pixels/frame")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sl->add_option("--min-length", o.stream.min_length, "Minimum arc length, pixels")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  auto* ras = app.add_subcommand("rasterize", "Draw normalized strokes as a greyscale sketch image");
  ras->add_option("sketch", o.sketch_in, "Sketch JSON")->required();
  ras->add_option("output", o.png_out, "Output PNG")->required();
  ras->add_option("--thickness", o.thickness, "Stroke width, pixels")->capture_default_str()->check(CLI::Range(1.0, 1e4));

  auto* sf = app.add_subcommand("sketchfield", "Dense motion field from sketch strokes");
  sf->add_option("sketch", o.sketch_in, "Sketch JSON")->required();
  sf->add_option("mask", o.mask_in, "Fluid mask PNG")->required();
  sf->add_option("output", o.flo_out, "Output motion field (.flo)")->required();
  sf->add_option("--sigma", o.sigma, "Gaussian width, pixels")->capture_default_str()->check(CLI::PositiveNumber);

  auto* an = app.add_subcommand("animate", "Render frame_%04d.png loop frames");
  an->add_option("image", o.image_in, "Source image PNG")->required();
  an->add_option("mask", o.mask_in, "Fluid mask PNG")->required();
  an->add_option("field", o.flo_in, "Motion field (.flo)")->required();
  an->add_option("output_dir", o.out_dir, "Output directory")->required();
  an->add_option("--frames", o.frames, "Loop length N")->capture_default_str()->check(CLI::Range(2, 100000));
  an->add_option("--z", o.z_policy, "Softmax importance: uniform or mag:<gamma>")->capture_default_str();

  auto* met = app.add_subcommand("metrics", "Compare fields and/or frames; prints JSON");
  met->add_option("--field", o.field_pair, "Two .flo files")->expected(2);
  met->add_option("--image", o.image_pair, "Two PNG files")->expected(2);
  met->add_option("--mask", o.metrics_mask, "Restrict AEPE to a fluid mask PNG");

  auto* srv = app.add_subcommand("serve", "Run the HTTP session service");
  srv->add_option("--host", o.host, "Bind address")->capture_default_str();
  srv->add_option("--port", o.port, "TCP port (0 picks a free one)")->capture_default_str()->check(CLI::Range(0, 65535));
  srv->add_option("--data-dir", o.data_dir, "Snapshot directory for sessions");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("cinemaloop");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "cinemaloop: usage error: " << e.what() << " (run with --help)\n";
    return kExitUsage;
  }

  try {
    if (vis->parsed()) return cmd_visualize(o, out);
    if (sl->parsed()) return cmd_streamlines(o, out);
    if (ras->parsed()) return cmd_rasterize(o, out);
    if (sf->parsed()) return cmd_sketchfield(o, out);
    if (an->parsed()) return cmd_animate(o, out);
    if (met->parsed()) return cmd_metrics(o, out);
    if (srv->parsed()) return cmd_serve(o, out);
  } catch (const UsageError& e) {
    err << "cinemaloop: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "cinemaloop: error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace cinemaloop
