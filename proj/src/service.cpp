#include "cinemaloop/service.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>

#include "cinemaloop/file_io.hpp"
#include "cinemaloop/flow_io.hpp"
#include "cinemaloop/image_io.hpp"
#include "cinemaloop/motionsynth.hpp"
#include "cinemaloop/sketch_json.hpp"
#include "cinemaloop/splat.hpp"
#include "cinemaloop/visualize.hpp"
#include "cinemaloop/zip.hpp"
#include "httplib.h"
#include "json.hpp"

namespace cinemaloop {

using nlohmann::json;
namespace fs = std::filesystem;

std::optional<std::string> HttpResponse::header(std::string_view name) const {
  for (const auto& [key, value] : headers)
    if (key == name) return value;
  return std::nullopt;
}

namespace {

std::span<const std::byte> as_bytes(std::string_view s) { return std::as_bytes(std::span(s.data(), s.size())); }

std::string to_string(const std::vector<std::byte>& bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump(), {}}; }

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}});
}

HttpResponse not_found(const std::string& id) { return error_response(404, "unknown session " + id); }

struct Session {
  std::mutex mutex;
  ImageU8 image;
  FluidMask mask;
  MotionSketchSet sketches;
  long long version = 1;

  std::optional<std::pair<long long, MotionField>> field_cache;
  struct Preview {
    long long version;
    int frames;
    std::string zip;
  };
  std::optional<Preview> preview_cache;
};

// Consistent copy of what a render needs, taken under the session lock.
struct Snapshot {
  long long version;
  ImageU8 image;
  FluidMask mask;
  MotionSketchSet sketches;
  std::optional<MotionField> field;
};

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

}  // namespace

struct SessionStore::Impl {
  ServiceOptions options;
  mutable std::shared_mutex registry_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::mutex rng_mutex;
  std::mt19937_64 rng{std::random_device{}()};

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(registry_mutex);
    const auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  std::string new_id() {
    std::lock_guard lock(rng_mutex);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(rng()));
    return buf;
  }

  // Caller holds the session lock.
  void persist(const std::string& id, const Session& s, bool with_images) const {
    if (!options.data_dir) return;
    const fs::path dir = *options.data_dir / id;
    fs::create_directories(dir);
    if (with_images) {
      write_file_atomic(dir / "image.png", encode_png(s.image));
      write_file_atomic(dir / "mask.png", encode_png(mask_to_image(s.mask)));
    }
    write_file_atomic(dir / "sketches.json", to_sketch_json(s.sketches));
    write_file_atomic(dir / "version", std::to_string(s.version) + "\n");
  }

  void restore() {
    if (!options.data_dir || !fs::is_directory(*options.data_dir)) return;
    for (const auto& entry : fs::directory_iterator(*options.data_dir)) {
      const std::string id = entry.path().filename().string();
      if (!entry.is_directory() || !valid_id(id)) continue;
      try {
        auto s = std::make_shared<Session>();
        s->image = decode_png_rgb(read_file(entry.path() / "image.png"));
        s->mask = decode_png_mask(read_file(entry.path() / "mask.png"));
        const auto sketch_bytes = read_file(entry.path() / "sketches.json");
        s->sketches = parse_sketch_json(to_string(sketch_bytes));
        s->version = std::stoll(to_string(read_file(entry.path() / "version")));
        if (s->image.extent() != s->mask.extent()) throw ValidationError("dimension mismatch");
        sessions.emplace(id, std::move(s));
      } catch (const std::exception& e) {
        std::fprintf(stderr, "cinemaloop: skipping snapshot %s: %s\n", entry.path().c_str(), e.what());
      }
    }
  }

  /// Locks the session, fails with 409 when there is nothing to render.
  std::optional<Snapshot> snapshot(Session& s, HttpResponse& error) const {
    std::lock_guard lock(s.mutex);
    if (s.sketches.strokes.empty()) {
      error = error_response(409, "no sketches");
      return std::nullopt;
    }
    Snapshot snap{s.version, s.image, s.mask, s.sketches, std::nullopt};
    if (s.field_cache && s.field_cache->first == s.version) snap.field = s.field_cache->second;
    return snap;
  }

  MotionField field_for(Session& s, Snapshot& snap) const {
    if (snap.field) return *snap.field;
    MotionField field = synthesize_field(snap.sketches, snap.mask);
    std::lock_guard lock(s.mutex);
    if (s.version == snap.version) s.field_cache.emplace(snap.version, field);
    return field;
  }
};

SessionStore::SessionStore(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->restore();
}

SessionStore::~SessionStore() = default;

std::size_t SessionStore::session_count() const {
  std::shared_lock lock(impl_->registry_mutex);
  return impl_->sessions.size();
}

HttpResponse SessionStore::create_session(std::string_view image_png, std::string_view mask_png) {
  auto s = std::make_shared<Session>();
  try {
    s->image = decode_png_rgb(as_bytes(image_png));
    s->mask = decode_png_mask(as_bytes(mask_png));
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
  if (s->image.extent() != s->mask.extent())
    return error_response(400, "dimension mismatch: image " + cinemaloop::to_string(s->image.extent()) + ", mask " +
                                   cinemaloop::to_string(s->mask.extent()));
  s->sketches.canvas = s->image.extent();

  std::string id;
  {
    std::unique_lock lock(impl_->registry_mutex);
    do id = impl_->new_id();
    while (impl_->sessions.count(id));
    impl_->sessions.emplace(id, s);
  }
  {
    std::lock_guard lock(s->mutex);
    impl_->persist(id, *s, true);
  }
  return json_response(201, json{{"id", id}});
}

HttpResponse SessionStore::put_sketches(const std::string& id, std::string_view body) {
  const auto s = impl_->find(id);
  if (!s) return not_found(id);

  MotionSketchSet prepared;
  try {
    prepared = prepare_sketches(parse_sketch_json(body));
  } catch (const Error& e) {
    return error_response(422, e.what());
  }

  std::lock_guard lock(s->mutex);
  if (prepared.canvas != s->image.extent())
    return error_response(422, "sketch canvas " + cinemaloop::to_string(prepared.canvas) + " does not match image " +
                                   cinemaloop::to_string(s->image.extent()));
  s->sketches = std::move(prepared);
  ++s->version;
  s->field_cache.reset();
  s->preview_cache.reset();
  impl_->persist(id, *s, false);

  HttpResponse r = json_response(200, json{{"version", s->version}, {"sketches", json::parse(to_sketch_json(s->sketches))}});
  r.headers.emplace_back(kVersionHeader, std::to_string(s->version));
  return r;
}

HttpResponse SessionStore::get_field(const std::string& id, std::string_view format) {
  if (format.empty()) format = "png";
  if (format != "png" && format != "flo") return error_response(422, "format must be png or flo");
  const auto s = impl_->find(id);
  if (!s) return not_found(id);

  HttpResponse r;
  auto snap = impl_->snapshot(*s, r);
  if (!snap) return r;
  const MotionField field = impl_->field_for(*s, *snap);

  if (format == "png") {
    r.content_type = "image/png";
    r.body = to_string(encode_png(visualize_flow(field)));
  } else {
    r.content_type = "application/octet-stream";
    r.body = to_string(save_flo(field));
  }
  r.headers.emplace_back(kVersionHeader, std::to_string(snap->version));
  return r;
}

HttpResponse SessionStore::get_streamlines(const std::string& id) {
  const auto s = impl_->find(id);
  if (!s) return not_found(id);

  HttpResponse r;
  auto snap = impl_->snapshot(*s, r);
  if (!snap) return r;
  const MotionField field = impl_->field_for(*s, *snap);

  r.body = to_sketch_json(extract_streamlines(field, snap->mask));
  r.headers.emplace_back(kVersionHeader, std::to_string(snap->version));
  return r;
}

HttpResponse SessionStore::get_preview(const std::string& id, std::string_view frames_text) {
  int frames = kDefaultPreviewFrames;
  if (!frames_text.empty()) {
    const auto [end, ec] = std::from_chars(frames_text.data(), frames_text.data() + frames_text.size(), frames);
    if (ec != std::errc() || end != frames_text.data() + frames_text.size())
      return error_response(422, "frames must be an integer");
  }
  if (frames < kMinPreviewFrames || frames > kMaxPreviewFrames)
    return error_response(422, "frames must be in [" + std::to_string(kMinPreviewFrames) + ", " +
                                   std::to_string(kMaxPreviewFrames) + "]");
  const auto s = impl_->find(id);
  if (!s) return not_found(id);

  HttpResponse r;
  r.content_type = "application/zip";
  {
    std::lock_guard lock(s->mutex);
    if (s->preview_cache && s->preview_cache->version == s->version && s->preview_cache->frames == frames) {
      r.body = s->preview_cache->zip;
      r.headers.emplace_back(kVersionHeader, std::to_string(s->version));
      r.headers.emplace_back(kCacheHeader, "hit");
      return r;
    }
  }

  auto snap = impl_->snapshot(*s, r);
  if (!snap) return r;
  const MotionField field = impl_->field_for(*s, *snap);
  const FrameSequence loop = render_loop(snap->image, field, snap->mask, frames);

  std::vector<ZipEntry> entries;
  entries.reserve(loop.frames.size());
  for (std::size_t n = 0; n < loop.frames.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.png", n);
    entries.push_back({name, to_string(encode_png(loop.frames[n]))});
  }
  r.body = make_zip(entries);
  {
    std::lock_guard lock(s->mutex);
    if (s->version == snap->version) s->preview_cache = Session::Preview{snap->version, frames, r.body};
  }
  r.headers.emplace_back(kVersionHeader, std::to_string(snap->version));
  r.headers.emplace_back(kCacheHeader, "miss");
  return r;
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) {}
};

namespace {

void reply(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  for (const auto& [k, v] : r.headers) res.set_header(k, v);
  res.set_content(r.body, r.content_type);
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, fn(req));
    } catch (const Error& e) {
      reply(res, error_response(422, e.what()));
    } catch (const std::exception& e) {
      reply(res, error_response(500, e.what()));
    }
  };
}

}  // namespace

HttpServer::HttpServer(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {
  auto& srv = impl_->server;
  SessionStore& st = store;

  srv.Post("/sessions", guarded([&st](const httplib::Request& req) {
             if (!req.is_multipart_form_data() || !req.has_file("image") || !req.has_file("mask"))
               return error_response(400, "expected multipart fields \"image\" and \"mask\"");
             return st.create_session(req.get_file_value("image").content, req.get_file_value("mask").content);
           }));
  srv.Put(R"(/sessions/([0-9a-z]+)/sketches)", guarded([&st](const httplib::Request& req) {
            return st.put_sketches(req.matches[1], req.body);
          }));
  srv.Get(R"(/sessions/([0-9a-z]+)/field)", guarded([&st](const httplib::Request& req) {
            return st.get_field(req.matches[1], req.get_param_value("format"));
          }));
  srv.Get(R"(/sessions/([0-9a-z]+)/streamlines)", guarded([&st](const httplib::Request& req) {
            return st.get_streamlines(req.matches[1]);
          }));
  srv.Get(R"(/sessions/([0-9a-z]+)/preview)", guarded([&st](const httplib::Request& req) {
            return st.get_preview(req.matches[1], req.get_param_value("frames"));
          }));
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content(json{{"error", httplib::status_message(res.status)}}.dump(), "application/json");
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    res.status = 500;
    res.set_content(json{{"error", "internal error"}}.dump(), "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("serve: cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("serve: cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace cinemaloop
