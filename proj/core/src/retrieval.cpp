#include "gazelearn/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include <nlohmann/json.hpp>

#include "gazelearn/errors.hpp"
#include "gazelearn/format.hpp"
#include "gazelearn/lecture.hpp"

namespace gazelearn {
namespace {

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string chunk_id(std::string_view document_id, std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04zu", ordinal);
  return std::string(document_id) + "#" + buf;
}

bool ranks_before(const ScoredChunk& a, const ScoredChunk& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.chunk.id < b.chunk.id;
}

std::vector<ScoredChunk> top_k(std::vector<ScoredChunk> scored, std::size_t k) {
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), ranks_before);
  scored.resize(k);
  return scored;
}

}  // namespace

std::vector<std::vector<double>> Embedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current += static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<double> HashingEmbedder::embed(std::string_view text) const {
  std::vector<double> v(dimension_, 0.0);
  for (const auto& token : tokenize(text)) {
    v[fnv1a64(token) % dimension_] += 1.0;
  }
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
  }
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvariantError(Violation::embedding_dimension, "cosine of vectors with different dimensions");
  }
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

std::vector<Chunk> chunk_document(std::string_view document_id, std::string_view text,
                                  std::optional<int> section_index, const ChunkingOptions& options) {
  if (options.target_tokens == 0 || options.overlap_tokens >= options.target_tokens) {
    throw Error(ErrorCode::invalid_argument, "chunking needs target_tokens > overlap_tokens");
  }
  const auto tokens = whitespace_tokens(text);
  if (tokens.empty()) {
    throw Error(ErrorCode::empty_document, "document '" + std::string(document_id) + "' has no tokens");
  }
  const std::size_t stride = options.target_tokens - options.overlap_tokens;
  std::vector<Chunk> chunks;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + options.target_tokens, tokens.size());
    std::string body;
    for (std::size_t i = start; i < end; ++i) {
      if (i > start) body += ' ';
      body += tokens[i];
    }
    chunks.push_back(Chunk{chunk_id(document_id, chunks.size()), section_index, std::move(body), {}});
    if (end == tokens.size()) break;
  }
  return chunks;
}

KnowledgeStore::KnowledgeStore(const KnowledgeStore& other) {
  std::shared_lock lock(other.mutex_);
  dimension_ = other.dimension_;
  chunks_ = other.chunks_;
  ids_ = other.ids_;
}

std::size_t KnowledgeStore::size() const {
  std::shared_lock lock(mutex_);
  return chunks_.size();
}

void KnowledgeStore::add(Chunk chunk) {
  if (chunk.embedding.size() != dimension_) {
    throw InvariantError(Violation::embedding_dimension,
                         "chunk " + chunk.id + " has dimension " + std::to_string(chunk.embedding.size()) +
                             ", store expects " + std::to_string(dimension_));
  }
  std::unique_lock lock(mutex_);
  if (!ids_.insert(chunk.id).second) {
    throw InvariantError(Violation::duplicate_chunk_id, chunk.id);
  }
  chunks_.push_back(std::move(chunk));
}

void KnowledgeStore::add_document(std::string_view document_id, std::string_view text,
                                  std::optional<int> section_index, const Embedder& embedder,
                                  const ChunkingOptions& options) {
  auto chunks = chunk_document(document_id, text, section_index, options);
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) texts.push_back(c.text);
  auto vectors = embedder.embed_batch(texts);
  if (vectors.size() != chunks.size()) {
    throw Error(ErrorCode::adapter, "embedder returned the wrong number of vectors");
  }
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    chunks[i].embedding = std::move(vectors[i]);
    add(std::move(chunks[i]));
  }
}

std::vector<Chunk> KnowledgeStore::chunks() const {
  std::shared_lock lock(mutex_);
  return chunks_;
}

std::vector<Chunk> KnowledgeStore::chunks_for_section(int section_index) const {
  std::shared_lock lock(mutex_);
  std::vector<Chunk> out;
  for (const auto& c : chunks_) {
    if (c.section_index == section_index) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Chunk& a, const Chunk& b) { return a.id < b.id; });
  return out;
}

std::vector<ScoredChunk> KnowledgeStore::search(std::span<const double> query, std::size_t k) const {
  if (k == 0) {
    throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  }
  std::shared_lock lock(mutex_);
  if (chunks_.empty()) {
    throw Error(ErrorCode::empty_store, "knowledge store is empty");
  }
  std::vector<ScoredChunk> scored;
  scored.reserve(chunks_.size());
  for (const auto& c : chunks_) {
    scored.push_back(ScoredChunk{c, cosine_similarity(query, c.embedding)});
  }
  return top_k(std::move(scored), k);
}

std::vector<ScoredChunk> KnowledgeStore::search_section(std::span<const double> query, int section_index,
                                                        std::size_t k) const {
  if (k == 0) {
    throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  }
  std::shared_lock lock(mutex_);
  std::vector<ScoredChunk> scored;
  for (const auto& c : chunks_) {
    if (c.section_index == section_index) {
      scored.push_back(ScoredChunk{c, cosine_similarity(query, c.embedding)});
    }
  }
  return top_k(std::move(scored), k);
}

std::string KnowledgeStore::to_json() const {
  std::shared_lock lock(mutex_);
  nlohmann::ordered_json doc;
  doc["dimension"] = dimension_;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : chunks_) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    if (c.section_index) j["section_index"] = *c.section_index;
    j["text"] = c.text;
    j["embedding"] = c.embedding;
    arr.push_back(std::move(j));
  }
  doc["chunks"] = std::move(arr);
  return doc.dump() + "\n";
}

KnowledgeStore KnowledgeStore::from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    KnowledgeStore store(doc.at("dimension").get<std::size_t>());
    for (const auto& j : doc.at("chunks")) {
      Chunk c;
      c.id = j.at("id").get<std::string>();
      if (auto it = j.find("section_index"); it != j.end() && !it->is_null()) {
        c.section_index = it->get<int>();
      }
      c.text = j.at("text").get<std::string>();
      c.embedding = j.at("embedding").get<std::vector<double>>();
      store.add(std::move(c));
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("knowledge-base snapshot: ") + e.what());
  }
}

void KnowledgeStore::save(const std::filesystem::path& path) const { write_file_atomic(path, to_json()); }

KnowledgeStore KnowledgeStore::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

std::vector<ScoredChunk> search(std::string_view query, const KnowledgeStore& store, const Embedder& embedder,
                                std::size_t k) {
  if (store.empty()) {
    throw Error(ErrorCode::empty_store, "knowledge store is empty");
  }
  return store.search(embedder.embed(query), k);
}

std::string build_grounded_prompt(std::string_view question, std::span<const Chunk> chunks,
                                  const PromptTemplate& prompt_template) {
  if (chunks.empty()) {
    throw Error(ErrorCode::invalid_argument, "a grounded prompt needs at least one chunk");
  }
  std::string out;
  out += prompt_template.instructions;
  out += "\n\n## Lecture material\n";
  for (const auto& c : chunks) {
    out += "[" + c.id + "] " + c.text + "\n";
  }
  out += "\n## Question\n";
  out += question;
  out += "\n";
  return out;
}

}  // namespace gazelearn
