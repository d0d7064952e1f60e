#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "gazelearn/adapter.hpp"
#include "gazelearn/retrieval.hpp"

namespace gazelearn {

/// "http://host:port/prefix" split into the origin and the path prefix.
struct HttpEndpoint {
  std::string origin;
  std::string path_prefix;

  static HttpEndpoint parse(std::string_view url);
};

/// TextAdapter speaking the JSON wire contract over HTTP:
/// POST {prefix}/generate, {prefix}/grade, {prefix}/answer.
class RemoteTextAdapter final : public TextAdapter {
 public:
  explicit RemoteTextAdapter(std::string_view url, int timeout_seconds = 60);
  GenerationResponse generate(const GenerationRequest& request) override;
  GradeResponse grade(const GradeRequest& request) override;
  std::string answer(std::string_view prompt) override;

 private:
  std::string post(const std::string& path, const std::string& body);

  HttpEndpoint endpoint_;
  int timeout_seconds_;
};

/// Embedder over HTTP: POST {prefix}/embed {texts: [..]} -> {vectors: [[..]]}.
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(std::string_view url, std::size_t dimension, int timeout_seconds = 30);
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) const override;
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) const override;

 private:
  HttpEndpoint endpoint_;
  std::size_t dimension_;
  int timeout_seconds_;
};

/// "mock" or an http:// URL.
std::unique_ptr<TextAdapter> make_text_adapter(std::string_view spec);

}  // namespace gazelearn
