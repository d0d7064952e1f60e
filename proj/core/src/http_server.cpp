#include "gazelearn/http_server.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace gazelearn::service {

struct HttpServer::Impl {
  explicit Impl(SessionService& s) : service(s) {}
  SessionService& service;
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

std::string internal_error_body(std::string_view message) {
  return nlohmann::json{{"code", "INTERNAL"}, {"message", message}}.dump();
}

}  // namespace

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  auto& svc = impl_->service;
  const std::string id = R"(([0-9A-Za-z\-]+))";

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  srv.Post("/v1/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.create_session(req.body));
  });
  srv.Get("/v1/sessions/" + id, [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_session(req.matches[1].str()));
  });
  srv.Post("/v1/sessions/" + id + "/gaze", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.upload_gaze(req.matches[1].str(), req.body));
  });
  srv.Post("/v1/sessions/" + id + "/quiz", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.create_quiz(req.matches[1].str()));
  });
  srv.Post("/v1/sessions/" + id + "/quiz/grade", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.grade(req.matches[1].str(), req.body));
  });
  srv.Post("/v1/sessions/" + id + "/chat", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.chat(req.matches[1].str(), req.body));
  });
  srv.Get("/v1/sessions/" + id + "/chatquiz", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.chatquiz(req.matches[1].str()));
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    res.status = 500;
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      res.set_content(internal_error_body(e.what()), "application/json");
    } catch (...) {
      res.set_content(internal_error_body("unknown error"), "application/json");
    }
  });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      res.set_content(R"({"code":"NOT_FOUND","message":"no such route"})", "application/json");
    }
  });
}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace gazelearn::service
