#pragma once

#include <memory>
#include <string>

#include "gazelearn/session_service.hpp"

namespace gazelearn::service {

/// HTTP/1.1 front end over SessionService.
///
///   POST /v1/sessions                      {lecture_id, group_mode}
///   GET  /v1/sessions/{id}
///   POST /v1/sessions/{id}/gaze            CSV body
///   POST /v1/sessions/{id}/quiz
///   POST /v1/sessions/{id}/quiz/grade      {item_id, response}
///   POST /v1/sessions/{id}/chat            {text}
///   GET  /v1/sessions/{id}/chatquiz
///   GET  /healthz
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gazelearn::service
