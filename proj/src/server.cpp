#include "chronicle/server.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "chronicle/protocol.hpp"
#include "chronicle/snapshot.hpp"
#include "httplib.h"

namespace chronicle {

using nlohmann::json;

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

ApiResponse reply(int status, const json& body) { return {status, body.dump()}; }

ApiResponse error_reply(int status, const std::string& kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  return reply(status, extra);
}

template <class F>
ApiResponse guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    return error_reply(400, "bad_request", std::string("invalid JSON: ") + e.what());
  } catch (const BadRequest& e) {
    return error_reply(400, "bad_request", e.what());
  } catch (const NotFound& e) {
    return error_reply(404, "not_found", e.what(), {{"depth", e.depth()}, {"segment", e.segment()}});
  } catch (const AttributeError& e) {
    return error_reply(422, "attribute_error", e.what(), {{"attribute", e.attribute()}});
  } catch (const InvalidRelease& e) {
    return error_reply(422, "invalid_release", e.what());
  } catch (const ValidationError& e) {
    return error_reply(422, "validation_error", e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "internal", e.what());
  }
}

json parse_body(const std::string& body) {
  if (body.empty()) throw BadRequest("empty request body");
  return json::parse(body);
}

}  // namespace

void ServerConfig::apply_env() {
  if (auto v = env("CHRONICLE_SNAPSHOT")) snapshot = *v;
  if (auto v = env("CHRONICLE_DATA")) {
    if (!data) data.emplace();
    data->dir = *v;
  }
  if (auto v = env("CHRONICLE_HOST")) host = *v;
  if (auto v = env("CHRONICLE_PORT")) {
    try {
      port = std::stoi(*v);
    } catch (const std::exception&) {
      throw ValidationError("CHRONICLE_PORT is not a number: " + *v);
    }
  }
  if (auto v = env("CHRONICLE_EPSILON")) {
    if (!data) data.emplace();
    try {
      data->dedup.epsilon = std::stod(*v);
    } catch (const std::exception&) {
      throw ValidationError("CHRONICLE_EPSILON is not a number: " + *v);
    }
  }
  if (auto v = env("CHRONICLE_NEIGHBORHOODS")) {
    if (!data) data.emplace();
    data->neighborhoods = *v;
  }
  if (auto v = env("CHRONICLE_DISTRICTS")) {
    if (!data) data.emplace();
    data->districts = *v;
  }
  if (auto v = env("CHRONICLE_STATIC")) static_dir = *v;
  if (auto v = env("CHRONICLE_CORS_ORIGIN")) cors_origin = *v;
}

void ServerConfig::validate() const {
  const bool has_data = data && !data->dir.empty();
  if (snapshot && has_data) throw ValidationError("give either a snapshot or a data directory, not both");
  if (!snapshot && !has_data) throw ValidationError("no snapshot or data directory configured");
  if (port < 0 || port > 65535) throw ValidationError("port out of range: " + std::to_string(port));
  if (has_data) data->dedup.validate();
}

std::shared_ptr<const Store> load_store(const ServerConfig& config) {
  config.validate();
  if (config.snapshot) return std::make_shared<const Store>(read_snapshot(*config.snapshot));
  PipelineOptions options = *config.data;
  options.threads = std::max(options.threads, config.threads);
  return std::make_shared<const Store>(run_pipeline(options).store);
}

void Api::attach(std::shared_ptr<Engine> engine) {
  std::lock_guard lock(mutex_);
  engine_ = std::move(engine);
  failure_.reset();
}

void Api::fail(std::string reason) {
  std::lock_guard lock(mutex_);
  failure_ = std::move(reason);
}

bool Api::ready() const {
  std::lock_guard lock(mutex_);
  return engine_ != nullptr;
}

std::shared_ptr<Engine> Api::engine() const {
  std::lock_guard lock(mutex_);
  return engine_;
}

SessionState Api::session() const {
  std::lock_guard lock(mutex_);
  return session_;
}

ApiResponse Api::handle(const std::string& method, const std::string& path, const std::string& body) {
  const bool known = path == "/api/meta" || path == "/api/query" || path == "/api/filter";
  if (!known) return error_reply(404, "not_found", "no endpoint " + path);
  if (!ready()) {
    std::lock_guard lock(mutex_);
    return error_reply(503, "loading", failure_ ? "load failed: " + *failure_ : "index is loading");
  }
  if (path == "/api/meta" && method == "GET") return meta();
  if (path == "/api/query" && method == "POST") return query(body);
  if (path == "/api/filter" && method == "POST") return set_filter(body);
  if (path == "/api/filter" && method == "DELETE") return clear_filter();
  return error_reply(405, "method_not_allowed", method + " not allowed on " + path);
}

ApiResponse Api::meta() const {
  return guarded([&] {
    json j = meta_json(*engine());
    const SessionState s = session();
    j["session"] = {{"regions", std::string(to_string(s.regions))}, {"skip_blocks", s.skip_blocks}};
    return reply(200, j);
  });
}

ApiResponse Api::query(const std::string& body) const {
  return guarded([&] {
    QueryRequest q = parse_query(parse_body(body));
    const SessionState s = session();
    if (!q.has_regions) q.tree.regions = s.regions;
    if (!q.has_skip_blocks) q.tree.skip_blocks = s.skip_blocks;
    const auto snapshot = engine()->current();
    return reply(200, execute(*snapshot, q));
  });
}

ApiResponse Api::set_filter(const std::string& body) {
  return guarded([&] {
    const json j = parse_body(body);
    if (!j.is_object()) throw BadRequest("filter body must be a JSON object");
    // Either a bare expression or {"filter": expr|null, "regions": .., "skip_blocks": ..}.
    const bool wrapped = j.contains("filter") || j.contains("regions") || j.contains("skip_blocks");
    SessionState next = session();
    if (wrapped && j.contains("regions")) {
      if (!j["regions"].is_string()) throw BadRequest("field 'regions' must be a string");
      next.regions = parse_region_kind(j["regions"].get<std::string>());
    }
    if (wrapped && j.contains("skip_blocks")) {
      if (!j["skip_blocks"].is_boolean()) throw BadRequest("field 'skip_blocks' must be a boolean");
      next.skip_blocks = j["skip_blocks"].get<bool>();
    }
    std::optional<FilterExpr> expr;
    if (!wrapped) {
      expr = parse_filter(j);
    } else if (j.contains("filter") && !j["filter"].is_null()) {
      expr = parse_filter(j["filter"]);
    }

    std::lock_guard update(update_mutex_);
    const auto engine = this->engine();
    std::uint64_t id = engine->current()->id();
    if (expr) {
      id = engine->apply_filter(*expr);
    } else if (!wrapped || j.contains("filter")) {
      id = engine->clear_filter();
    }
    {
      std::lock_guard lock(mutex_);
      session_ = next;
    }
    return reply(202, {{"snapshot", id},
                       {"regions", std::string(to_string(next.regions))},
                       {"skip_blocks", next.skip_blocks}});
  });
}

ApiResponse Api::clear_filter() {
  return guarded([&] {
    std::lock_guard update(update_mutex_);
    return reply(202, {{"snapshot", engine()->clear_filter()}});
  });
}

HttpServer::HttpServer(Api& api, const ServerConfig& config)
    : api_(api), config_(config), http_(std::make_unique<httplib::Server>()) {
  http_->set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                              {"Access-Control-Allow-Headers", "Content-Type, X-Chronicle-Session"},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse out = api_.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  http_->Get("/api/meta", route);
  http_->Post("/api/query", route);
  http_->Post("/api/filter", route);
  http_->Delete("/api/filter", route);
  http_->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  if (config_.static_dir) {
    if (!http_->set_mount_point("/", config_.static_dir->string())) {
      throw LoadError("static directory not found: " + config_.static_dir->string());
    }
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (config_.port == 0) {
    const int port = http_->bind_to_any_port(config_.host);
    if (port < 0) throw LoadError("cannot bind " + config_.host);
    return port;
  }
  if (!http_->bind_to_port(config_.host, config_.port)) {
    throw LoadError("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return config_.port;
}

void HttpServer::listen() { http_->listen_after_bind(); }

void HttpServer::wait_until_ready() const { http_->wait_until_ready(); }

void HttpServer::stop() {
  if (http_) http_->stop();
}

int run_server(const ServerConfig& config, const std::function<void(const std::string&)>& log) {
  config.validate();
  Api api;
  HttpServer server(api, config);
  const int port = server.bind();
  log("listening on http://" + config.host + ":" + std::to_string(port));

  int status = 0;
  std::jthread loader([&] {
    const auto start = std::chrono::steady_clock::now();
    try {
      auto store = load_store(config);
      auto engine = std::make_shared<Engine>(std::move(store), config.threads);
      engine->indexes().build_all();
      api.attach(std::move(engine));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::ostringstream msg;
      msg << "ready in " << secs << " s";
      log(msg.str());
    } catch (const std::exception& e) {
      api.fail(e.what());
      log(std::string("load failed: ") + e.what());
      status = 2;
      server.wait_until_ready();
      server.stop();
    }
  });
  server.listen();
  return status;
}

}  // namespace chronicle
