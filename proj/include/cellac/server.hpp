#pragma once

#include <memory>
#include <string>

namespace cellac {

class Engine;

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// Route handlers, usable without a socket.
HttpReply handle_suggest(const Engine& engine, const std::string& body);
HttpReply handle_health(const Engine& engine);
HttpReply handle_stats(const Engine& engine);

/// POST /v1/suggest, GET /v1/health, GET /v1/stats over HTTP. Errors carry
/// {"error": {"code", "message"}}.
class Server {
 public:
  explicit Server(const Engine& engine);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cellac
