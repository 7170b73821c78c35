// Local HTTP server over a fixture directory, counting requests per path.
#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>

namespace testutil {

class SiteServer {
 public:
  explicit SiteServer(const std::filesystem::path& root, const std::function<void(httplib::Server&)>& setup = {}) {
    if (setup) setup(server_);
    if (!root.empty()) server_.set_mount_point("/", root.string());
    // Counted before routing so the count is visible once the client has its response.
    server_.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response&) {
      std::lock_guard lock(mutex_);
      ++hits_[req.path];
      return httplib::Server::HandlerResponse::Unhandled;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~SiteServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  SiteServer(const SiteServer&) = delete;
  SiteServer& operator=(const SiteServer&) = delete;

  httplib::Server& http() { return server_; }
  int port() const { return port_; }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int hits(const std::string& path) const {
    std::lock_guard lock(mutex_);
    auto it = hits_.find(path);
    return it == hits_.end() ? 0 : it->second;
  }
  int total_hits() const {
    std::lock_guard lock(mutex_);
    int n = 0;
    for (const auto& [p, c] : hits_) n += c;
    return n;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::map<std::string, int> hits_;
};

}  // namespace testutil
