#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "chronicle/engine.hpp"
#include "chronicle/pipeline.hpp"

namespace httplib {
class Server;
}

namespace chronicle {

struct ServerConfig {
  /// Exactly one source: a snapshot file or a data directory to ingest.
  std::optional<std::filesystem::path> snapshot;
  std::optional<PipelineOptions> data;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  std::string cors_origin = "*";
  unsigned threads = 1;

  /// Overlays CHRONICLE_SNAPSHOT, CHRONICLE_DATA, CHRONICLE_HOST,
  /// CHRONICLE_PORT, CHRONICLE_EPSILON, CHRONICLE_NEIGHBORHOODS,
  /// CHRONICLE_DISTRICTS, CHRONICLE_STATIC and CHRONICLE_CORS_ORIGIN.
  void apply_env();
  /// Throws ValidationError when no or both sources are set or the port is
  /// out of range.
  void validate() const;
};

/// Region set and block-skip flag applied to queries that leave them out.
struct SessionState {
  RegionKind regions = RegionKind::Neighborhood;
  bool skip_blocks = false;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// The HTTP API without sockets. Until an engine is attached every
/// endpoint answers 503.
class Api {
 public:
  Api() = default;
  explicit Api(std::shared_ptr<Engine> engine) { attach(std::move(engine)); }

  void attach(std::shared_ptr<Engine> engine);
  void fail(std::string reason);
  bool ready() const;
  std::shared_ptr<Engine> engine() const;
  SessionState session() const;

  /// `path` excludes the query string.
  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

 private:
  ApiResponse meta() const;
  ApiResponse query(const std::string& body) const;
  ApiResponse set_filter(const std::string& body);
  ApiResponse clear_filter();

  mutable std::mutex mutex_;
  std::shared_ptr<Engine> engine_;
  std::optional<std::string> failure_;
  SessionState session_;
  /// Serializes session and filter updates.
  std::mutex update_mutex_;
};

/// Loads the store named by the config.
std::shared_ptr<const Store> load_store(const ServerConfig& config);

/// cpp-httplib front end for an Api.
class HttpServer {
 public:
  HttpServer(Api& api, const ServerConfig& config);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to config.host:config.port (0 picks a free port); returns the port.
  int bind();
  /// Blocks until stop().
  void listen();
  void wait_until_ready() const;
  void stop();

 private:
  Api& api_;
  ServerConfig config_;
  std::unique_ptr<httplib::Server> http_;
};

/// Starts listening, loads the store in the background and logs a ready
/// line with the load time. Returns when the server stops or loading fails.
int run_server(const ServerConfig& config, const std::function<void(const std::string&)>& log);

}  // namespace chronicle
