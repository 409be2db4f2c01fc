#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "mfp/service.hpp"

namespace mfp {

// HTTP+JSON front end for SessionService.
//
//   POST /sessions                 JSON body, or a raw PNG (Content-Type: image/png)
//   GET  /sessions/{id}
//   POST /sessions/{id}/clicks     {"row": r, "col": c, "label": "fg"|"bg"}
//   POST /sessions/{id}/undo
//   POST /sessions/{id}/reset
//   GET  /datasets
//   GET  /datasets/{name}/{sample}
class HttpServer {
 public:
  HttpServer(SessionService& service, std::filesystem::path static_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts serving on a background thread. Port 0 picks a free
  // port. Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks serving on the calling thread.
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mfp
