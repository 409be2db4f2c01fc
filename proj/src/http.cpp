#include "mfp/http.hpp"

#include <thread>

#include <httplib.h>

namespace mfp {

namespace {

using json = nlohmann::json;

void send(httplib::Response& res, const SessionService::Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send(res, {status, {{"error", msg}}});
}

bool parse_body(const httplib::Request& req, httplib::Response& res, json& out) {
  if (req.body.empty()) {
    out = json::object();
    return true;
  }
  try {
    out = json::parse(req.body);
    return true;
  } catch (const json::exception& e) {
    send_error(res, 400, std::string("malformed JSON: ") + e.what());
    return false;
  }
}

bool looks_like_png(const std::string& body) { return body.size() >= 8 && body.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0; }

}  // namespace

struct HttpServer::Impl {
  SessionService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(SessionService& s) : service(s) {}
};

HttpServer::HttpServer(SessionService& service, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  auto& svc = impl_->service;

  srv.Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto ctype = req.get_header_value("Content-Type");
    if (ctype.rfind("image/", 0) == 0 || looks_like_png(req.body)) {
      send(res, svc.create_session_from_png(req.body));
      return;
    }
    json body;
    if (parse_body(req, res, body)) send(res, svc.create_session(body));
  });
  srv.Get(R"(/sessions/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_session(req.matches[1]));
  });
  srv.Post(R"(/sessions/([^/]+)/clicks)", [&svc](const httplib::Request& req, httplib::Response& res) {
    json body;
    if (parse_body(req, res, body)) send(res, svc.add_click(req.matches[1], body));
  });
  srv.Post(R"(/sessions/([^/]+)/undo)", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.undo(req.matches[1]));
  });
  srv.Post(R"(/sessions/([^/]+)/reset)", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.reset(req.matches[1]));
  });
  srv.Get("/datasets", [&svc](const httplib::Request&, httplib::Response& res) { send(res, svc.list_datasets()); });
  srv.Get(R"(/datasets/([^/]+)/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_dataset_sample(req.matches[1], req.matches[2]));
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    } catch (...) {
      send_error(res, 500, "internal error");
    }
  });
  if (!static_dir.empty()) srv.set_mount_point("/", static_dir.string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace mfp
