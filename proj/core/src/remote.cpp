#include "gazelearn/remote.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gazelearn/errors.hpp"

namespace gazelearn {
using nlohmann::json;

HttpEndpoint HttpEndpoint::parse(std::string_view url) {
  const auto scheme = url.find("://");
  if (scheme == std::string_view::npos || url.substr(0, scheme) != "http") {
    throw Error(ErrorCode::invalid_argument, "endpoint must be an http:// URL: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme + 3);
  HttpEndpoint e;
  if (path_start == std::string_view::npos) {
    e.origin = std::string(url);
  } else {
    e.origin = std::string(url.substr(0, path_start));
    e.path_prefix = std::string(url.substr(path_start));
    while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
  }
  if (e.origin.size() <= scheme + 3) {
    throw Error(ErrorCode::invalid_argument, "endpoint has no host: " + std::string(url));
  }
  return e;
}

namespace {

std::string post_json(const HttpEndpoint& endpoint, const std::string& path, const std::string& body,
                      int timeout_seconds) {
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);
  auto result = client.Post(endpoint.path_prefix + path, body, "application/json");
  if (!result) {
    throw AdapterError("POST " + endpoint.origin + endpoint.path_prefix + path + ": " +
                       httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw AdapterError("POST " + endpoint.path_prefix + path + " returned HTTP " + std::to_string(result->status));
  }
  return result->body;
}

json parse_reply(const std::string& body, std::string_view what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw AdapterError(std::string(what) + " reply is not JSON: " + e.what());
  }
}

}  // namespace

RemoteTextAdapter::RemoteTextAdapter(std::string_view url, int timeout_seconds)
    : endpoint_(HttpEndpoint::parse(url)), timeout_seconds_(timeout_seconds) {}

std::string RemoteTextAdapter::post(const std::string& path, const std::string& body) {
  return post_json(endpoint_, path, body, timeout_seconds_);
}

GenerationResponse RemoteTextAdapter::generate(const GenerationRequest& request) {
  const auto reply = parse_reply(post("/generate", to_json(request).dump()), "generate");
  try {
    return generation_response_from_json(reply);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_generation, std::string("generate reply: ") + e.what());
  }
}

GradeResponse RemoteTextAdapter::grade(const GradeRequest& request) {
  const auto reply = parse_reply(post("/grade", to_json(request).dump()), "grade");
  try {
    return grade_response_from_json(reply);
  } catch (const json::exception& e) {
    throw AdapterError(std::string("grade reply: ") + e.what());
  }
}

std::string RemoteTextAdapter::answer(std::string_view prompt) {
  const auto reply = parse_reply(post("/answer", json{{"prompt", prompt}}.dump()), "answer");
  if (!reply.is_object() || !reply.contains("answer") || !reply["answer"].is_string()) {
    throw AdapterError("answer reply lacks an answer string");
  }
  return reply["answer"].get<std::string>();
}

RemoteEmbedder::RemoteEmbedder(std::string_view url, std::size_t dimension, int timeout_seconds)
    : endpoint_(HttpEndpoint::parse(url)), dimension_(dimension), timeout_seconds_(timeout_seconds) {}

std::vector<double> RemoteEmbedder::embed(std::string_view text) const {
  const std::string one(text);
  return embed_batch(std::span<const std::string>(&one, 1)).front();
}

std::vector<std::vector<double>> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
  json request{{"texts", json::array()}};
  for (const auto& t : texts) request["texts"].push_back(t);
  const auto reply = parse_reply(post_json(endpoint_, "/embed", request.dump(), timeout_seconds_), "embed");
  std::vector<std::vector<double>> out;
  try {
    out = reply.at("vectors").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw AdapterError(std::string("embed reply: ") + e.what());
  }
  if (out.size() != texts.size()) {
    throw AdapterError("embed reply has " + std::to_string(out.size()) + " vectors for " +
                       std::to_string(texts.size()) + " texts");
  }
  for (const auto& v : out) {
    if (v.size() != dimension_) {
      throw InvariantError(Violation::embedding_dimension,
                           "embedder returned dimension " + std::to_string(v.size()) + ", expected " +
                               std::to_string(dimension_));
    }
  }
  return out;
}

std::unique_ptr<TextAdapter> make_text_adapter(std::string_view spec) {
  if (spec == "mock") return std::make_unique<MockAdapter>();
  return std::make_unique<RemoteTextAdapter>(spec);
}

}  // namespace gazelearn
