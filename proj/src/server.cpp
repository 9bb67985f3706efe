#include "cellac/server.hpp"

#include "cellac/engine.hpp"
#include "httplib.h"
#include "json.hpp"

namespace cellac {

namespace {

HttpReply error_reply(int status, const std::string& code, const std::string& message) {
  nlohmann::json j = {{"error", {{"code", code}, {"message", message}}}};
  return {status, j.dump()};
}

}  // namespace

HttpReply handle_suggest(const Engine& engine, const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    return error_reply(400, "malformed_body", e.what());
  }
  try {
    const auto req = parse_suggest_request(j, engine.config().k);
    return {200, engine.to_json(engine.suggest(req)).dump()};
  } catch (const RequestError& e) {
    return error_reply(400, e.code, e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "internal", e.what());
  }
}

HttpReply handle_health(const Engine& engine) { return {200, engine.health_json().dump()}; }

HttpReply handle_stats(const Engine& engine) { return {200, engine.stats_json().dump()}; }

struct Server::Impl {
  const Engine* engine;
  httplib::Server http;
};

Server::Server(const Engine& engine) : impl_(std::make_unique<Impl>()) {
  impl_->engine = &engine;
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  const Engine* e = &engine;
  impl_->http.Post("/v1/suggest", [e, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_suggest(*e, req.body));
  });
  impl_->http.Get("/v1/health",
                  [e, send](const httplib::Request&, httplib::Response& res) { send(res, handle_health(*e)); });
  impl_->http.Get("/v1/stats",
                  [e, send](const httplib::Request&, httplib::Response& res) { send(res, handle_stats(*e)); });
  // The browser client may be served from another origin.
  impl_->http.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });
  impl_->http.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

Server::~Server() = default;

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

}  // namespace cellac
