#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gazelearn {

struct Chunk {
  std::string id;  // "<document id>#<ordinal, 4 digits>"
  std::optional<int> section_index;
  std::string text;
  std::vector<double> embedding;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;
  virtual std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) const;
};

/// Lowercased alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Bag of hashed tokens, L2-normalized. Deterministic and offline; the zero
/// vector for text without tokens.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension = 64) : dimension_(dimension) {}
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

/// Cosine similarity; 0 when either vector is zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct ChunkingOptions {
  std::size_t target_tokens = 200;
  std::size_t overlap_tokens = 40;
};

/// Whitespace-token windows of target size, consecutive windows sharing
/// overlap_tokens. The last window may be short. Chunks come back unembedded.
std::vector<Chunk> chunk_document(std::string_view document_id, std::string_view text,
                                  std::optional<int> section_index = std::nullopt,
                                  const ChunkingOptions& options = {});

struct ScoredChunk {
  Chunk chunk;
  double score = 0.0;
};

/// In-memory chunk store with exhaustive cosine search. Reads may run
/// concurrently; add() takes exclusive access.
class KnowledgeStore {
 public:
  explicit KnowledgeStore(std::size_t dimension) : dimension_(dimension) {}

  KnowledgeStore(const KnowledgeStore& other);
  KnowledgeStore& operator=(const KnowledgeStore&) = delete;

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Embedding dimension must match and ids must be unique.
  void add(Chunk chunk);

  /// Embeds and adds every chunk of a document.
  void add_document(std::string_view document_id, std::string_view text, std::optional<int> section_index,
                    const Embedder& embedder, const ChunkingOptions& options = {});

  std::vector<Chunk> chunks() const;
  std::vector<Chunk> chunks_for_section(int section_index) const;

  /// Top-k by cosine similarity, ties by id ascending.
  std::vector<ScoredChunk> search(std::span<const double> query, std::size_t k) const;

  /// Restricted to chunks tagged with the given section.
  std::vector<ScoredChunk> search_section(std::span<const double> query, int section_index,
                                          std::size_t k) const;

  /// Snapshot file: {dimension, chunks: [{id, section_index?, text, embedding}]}
  std::string to_json() const;
  static KnowledgeStore from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static KnowledgeStore load(const std::filesystem::path& path);

 private:
  std::size_t dimension_;
  std::vector<Chunk> chunks_;
  std::unordered_set<std::string> ids_;
  mutable std::shared_mutex mutex_;
};

std::vector<ScoredChunk> search(std::string_view query, const KnowledgeStore& store, const Embedder& embedder,
                                std::size_t k);

struct PromptTemplate {
  std::string instructions =
      "You are a teaching assistant for a university lecture. Answer the student's question using "
      "only the lecture material below. Cite the excerpt ids you relied on in square brackets. If the "
      "material does not cover the question, say so.";
};

/// Instructions, then each excerpt with its id in rank order, then the question.
std::string build_grounded_prompt(std::string_view question, std::span<const Chunk> chunks,
                                  const PromptTemplate& prompt_template = {});

}  // namespace gazelearn
