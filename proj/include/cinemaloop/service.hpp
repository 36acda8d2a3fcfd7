#pragma once

// Session-based HTTP interface used by the studio UI.
//
//   POST /sessions                         multipart "image" + "mask" PNGs -> 201 {"id"}
//   PUT  /sessions/{id}/sketches           sketch JSON -> 200 {"version"}
//   GET  /sessions/{id}/field?format=png|flo
//   GET  /sessions/{id}/streamlines        sketch JSON of the current field's streamlines
//   GET  /sessions/{id}/preview?frames=N   zip of frame_%04d.png
//
// Errors are {"error": "..."}. Responses derived from sketches carry the
// session version they were computed at in X-Session-Version.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cinemaloop {

inline constexpr int kMinPreviewFrames = 2;
inline constexpr int kMaxPreviewFrames = 240;
inline constexpr int kDefaultPreviewFrames = 60;
inline constexpr const char* kVersionHeader = "X-Session-Version";
/// "hit" or "miss" on preview responses.
inline constexpr const char* kCacheHeader = "X-Cache";

struct ServiceOptions {
  /// Sessions are snapshotted here on every mutation and reloaded at startup.
  std::optional<std::filesystem::path> data_dir;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  std::optional<std::string> header(std::string_view name) const;
};

/// In-memory sessions and the request handlers, independent of the HTTP
/// transport. Safe to call from many threads: mutations of one session are
/// serialized, and rendering runs outside the session lock.
class SessionStore {
 public:
  explicit SessionStore(ServiceOptions options = {});
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  HttpResponse create_session(std::string_view image_png, std::string_view mask_png);
  HttpResponse put_sketches(const std::string& id, std::string_view body);
  /// `format` is "png" (color-wheel rendering) or "flo".
  HttpResponse get_field(const std::string& id, std::string_view format);
  HttpResponse get_streamlines(const std::string& id);
  /// `frames` is the raw query value; empty means the default.
  HttpResponse get_preview(const std::string& id, std::string_view frames);

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// httplib front end for a SessionStore.
class HttpServer {
 public:
  explicit HttpServer(SessionStore& store);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Call bind() first.
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cinemaloop
