#include <charconv>
#include <mutex>

#include <httplib.h>

#include "newscheck/service.hpp"

namespace newscheck {

using nlohmann::json;

struct Server::Impl {
  httplib::Server http;
  ServerOptions options;
  mutable std::mutex mutex;
  std::shared_ptr<const ModelRegistry> registry;

  std::shared_ptr<const ModelRegistry> current() const {
    std::lock_guard lock(mutex);
    return registry;
  }
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

Server::Server(std::shared_ptr<const ModelRegistry> registry, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!registry) throw ConfigError("server needs a registry");
  registry->validate();
  impl_->registry = std::move(registry);
  impl_->options = std::move(options);
  Impl* self = impl_.get();
  auto& http = impl_->http;
  http.set_payload_max_length(impl_->options.max_body);

  http.set_post_routing_handler([self](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", self->options.cors_origin);
    res.set_header("Vary", "Origin");
  });
  http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });

  http.Get("/health", [self](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}, {"models", self->current()->entries.size()}});
  });
  http.Get("/api/models", [self](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, registry_summary(*self->current()));
  });
  http.Post("/api/verify", [self](const httplib::Request& req, httplib::Response& res) {
    std::string text;
    try {
      const json body = json::parse(req.body);
      if (!body.is_object() || !body.contains("text") || !body.at("text").is_string()) {
        send_json(res, 422, {{"error", "body must be a JSON object with a string \"text\""}});
        return;
      }
      text = body.at("text").get<std::string>();
    } catch (const json::exception&) {
      send_json(res, 422, {{"error", "body is not valid JSON"}});
      return;
    }
    // One snapshot per request, so a reload never mixes registries.
    const auto registry = self->current();
    try {
      send_json(res, 200, to_json(verify(text, *registry)));
    } catch (const ValidationError& e) {
      send_json(res, 422, {{"error", e.what()}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  });

  if (impl_->options.static_dir) {
    if (!http.set_mount_point("/", impl_->options.static_dir->string())) {
      throw ConfigError("cannot serve static files from '" + impl_->options.static_dir->string() + "'");
    }
  }
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    if (bound <= 0) throw Error("cannot bind " + host + ":0");
    return bound;
  }
  if (!impl_->http.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Server::listen() {
  if (!impl_->http.listen_after_bind()) throw Error("server stopped with an error");
}

void Server::stop() {
  if (impl_) impl_->http.stop();
}

bool Server::running() const { return impl_->http.is_running(); }

void Server::reload(std::shared_ptr<const ModelRegistry> registry) {
  if (!registry) throw ConfigError("server needs a registry");
  registry->validate();
  std::lock_guard lock(impl_->mutex);
  impl_->registry = std::move(registry);
}

std::shared_ptr<const ModelRegistry> Server::registry() const { return impl_->current(); }

std::pair<std::string, int> parse_bind_address(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ValidationError("bind address must be host:port, got '" + std::string(text) + "'");
  }
  int port = -1;
  const auto digits = text.substr(colon + 1);
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || p != digits.data() + digits.size() || port < 0 || port > 65535) {
    throw ValidationError("bad port in bind address '" + std::string(text) + "'");
  }
  std::string host(text.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return {host, port};
}

}  // namespace newscheck
