#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "gazelearn/errors.hpp"
#include "gazelearn/retrieval.hpp"
#include "test_support.hpp"

using namespace gazelearn;

namespace {

std::string words(std::size_t n, std::size_t offset = 0) {
  std::string text;
  for (std::size_t i = 0; i < n; ++i) text += (i ? " w" : "w") + std::to_string(i + offset);
  return text;
}

std::vector<std::string> random_texts(std::size_t count, std::uint64_t seed) {
  static const std::vector<std::string> vocab{"gaze",  "slide", "avatar", "matrix", "vector", "loss",  "model",
                                              "error", "train", "test",   "label",  "tree",   "graph", "node"};
  std::mt19937_64 gen(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string t;
    const auto len = 1 + gen() % 6;
    for (std::size_t w = 0; w < len; ++w) t += vocab[gen() % vocab.size()] + " ";
    out.push_back(t);
  }
  return out;
}

std::vector<std::string> exhaustive_ranking(const KnowledgeStore& store, const std::vector<double>& q, std::size_t k) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto& c : store.chunks()) all.emplace_back(cosine_similarity(q, c.embedding), c.id);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) ids.push_back(all[i].second);
  return ids;
}

}  // namespace

TEST(Chunking, WindowArithmetic) {
  EXPECT_EQ(chunk_document("d", words(200)).size(), 1u);
  const auto two = chunk_document("d", words(360));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].id, "d#0000");
  EXPECT_EQ(two[1].id, "d#0001");
  EXPECT_TRUE(two[1].text.starts_with("w160 "));
  EXPECT_TRUE(two[1].text.ends_with(" w359"));
  EXPECT_EQ(chunk_document("d", words(360)), two);
  const auto three = chunk_document("d", words(361));
  EXPECT_EQ(three.size(), 3u);
  EXPECT_EQ(chunk_document("d", words(10), 4, ChunkingOptions{4, 1}).size(), 3u);
  EXPECT_EQ(chunk_document("d", words(10), 4)[0].section_index, 4);
}

TEST(Chunking, EmptyDocument) {
  try {
    chunk_document("d", " \n\t ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_document);
  }
  EXPECT_THROW(chunk_document("d", "a b", std::nullopt, ChunkingOptions{5, 5}), Error);
}

TEST(Embedder, DeterministicUnitVectors) {
  HashingEmbedder e;
  const auto a = e.embed("Gradient descent, gradient DESCENT!");
  EXPECT_EQ(a.size(), 64u);
  EXPECT_EQ(a, e.embed("gradient descent gradient descent"));
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-12);
  EXPECT_EQ(e.embed("..."), std::vector<double>(64, 0.0));
  EXPECT_EQ(tokenize("Hello, World_42 x"), (std::vector<std::string>{"hello", "world", "42", "x"}));
}

TEST(Cosine, SymmetricAndBounded) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(16), b(16);
    for (auto& x : a) x = n01(gen);
    for (auto& x : b) x = n01(gen);
    const double ab = cosine_similarity(a, b);
    EXPECT_EQ(ab, cosine_similarity(b, a));
    EXPECT_GE(ab, -1.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-12);
  }
  EXPECT_THROW(cosine_similarity(std::vector<double>(3), std::vector<double>(4)), InvariantError);
}

TEST(Store, InvariantsAndErrors) {
  HashingEmbedder e;
  KnowledgeStore store(64);
  try {
    search("x", store, e, 3);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::empty_store);
  }
  store.add({"a#0000", std::nullopt, "alpha", e.embed("alpha")});
  EXPECT_THROW(store.add({"a#0000", std::nullopt, "alpha", e.embed("alpha")}), InvariantError);
  EXPECT_THROW(store.add({"b#0000", std::nullopt, "beta", std::vector<double>(8, 0.0)}), InvariantError);
  EXPECT_THROW(search("x", store, e, 0), Error);
}

TEST(Store, IdenticalTextRanksFirstAndLargeK) {
  HashingEmbedder e;
  KnowledgeStore store(64);
  const auto texts = random_texts(30, 8);
  for (std::size_t i = 0; i < texts.size(); ++i) store.add({"c" + std::to_string(100 + i), std::nullopt, texts[i], e.embed(texts[i])});
  store.add({"needle", std::nullopt, "unique quokka sentence", e.embed("unique quokka sentence")});
  EXPECT_EQ(search("unique quokka sentence", store, e, 3).front().chunk.id, "needle");
  EXPECT_EQ(search("gaze slide", store, e, 1000).size(), 31u);
}

TEST(Store, FiveHundredChunkSearchMatchesExhaustiveOracle) {
  HashingEmbedder e;
  KnowledgeStore store(64);
  const auto texts = random_texts(500, 21);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    store.add({"doc-" + std::to_string(i % 7) + "#" + std::to_string(1000 + i), std::nullopt, texts[i], e.embed(texts[i])});
  }
  for (const auto& q : random_texts(20, 99)) {
    const auto qv = e.embed(q);
    for (std::size_t k : {1u, 5u, 20u}) {
      std::vector<std::string> got;
      for (const auto& hit : store.search(qv, k)) got.push_back(hit.chunk.id);
      EXPECT_EQ(got, exhaustive_ranking(store, qv, k)) << q << " k=" << k;
    }
  }
}

TEST(Store, InsertionOrderDoesNotMatter) {
  HashingEmbedder e;
  auto texts = random_texts(100, 5);
  KnowledgeStore forward(64), backward(64);
  for (std::size_t i = 0; i < texts.size(); ++i) forward.add({"id" + std::to_string(i), std::nullopt, texts[i], e.embed(texts[i])});
  for (std::size_t i = texts.size(); i-- > 0;) backward.add({"id" + std::to_string(i), std::nullopt, texts[i], e.embed(texts[i])});
  for (const auto& q : random_texts(10, 6)) {
    const auto a = search(q, forward, e, 10), b = search(q, backward, e, 10);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].chunk.id, b[i].chunk.id);
  }
}

TEST(Store, SnapshotRoundTripAndSections) {
  HashingEmbedder e;
  KnowledgeStore store(64);
  store.add_document("lec-s2", words(300), 2, e);
  store.add_document("book", words(50, 7), std::nullopt, e);
  EXPECT_EQ(store.chunks_for_section(2).size(), 2u);
  gazelearn::testing::TempDir dir;
  store.save(dir.path() / "kb.json");
  const auto loaded = KnowledgeStore::load(dir.path() / "kb.json");
  EXPECT_EQ(loaded.chunks(), store.chunks());
  EXPECT_EQ(loaded.dimension(), 64u);
  const auto in_section = store.search_section(e.embed("w5"), 2, 10);
  for (const auto& hit : in_section) EXPECT_EQ(hit.chunk.section_index, 2);
  EXPECT_THROW(KnowledgeStore::from_json(R"({"dimension":2,"chunks":[{"id":"a","text":"t","embedding":[1]}]})"), Error);
}

TEST(Store, ConcurrentReadersAndWriter) {
  HashingEmbedder e;
  KnowledgeStore store(64);
  store.add({"seed", std::nullopt, "seed", e.embed("seed")});
  std::vector<std::thread> threads;
  for (int r = 0; r < 4; ++r) {
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i) EXPECT_FALSE(search("gaze", store, e, 3).empty());
    });
  }
  threads.emplace_back([&] {
    for (int i = 0; i < 200; ++i) store.add({"w" + std::to_string(i), std::nullopt, "gaze", e.embed("gaze")});
  });
  for (auto& t : threads) t.join();
  EXPECT_EQ(store.size(), 201u);
}

TEST(GroundedPrompt, LayoutAndDeterminism) {
  const std::vector<Chunk> chunks{{"b#0001", 1, "second excerpt", {}}, {"a#0000", 1, "first excerpt", {}},
                                  {"c#0002", 1, "third excerpt", {}}};
  const auto prompt = build_grounded_prompt("What is a gradient?", chunks);
  const auto pb = prompt.find("[b#0001] second excerpt");
  const auto pa = prompt.find("[a#0000] first excerpt");
  const auto pc = prompt.find("[c#0002] third excerpt");
  ASSERT_NE(pb, std::string::npos);
  EXPECT_LT(pb, pa);  // rank order, not id order
  EXPECT_LT(pa, pc);
  EXPECT_GT(prompt.find("What is a gradient?"), pc);
  EXPECT_EQ(prompt, build_grounded_prompt("What is a gradient?", chunks));
  const auto one = build_grounded_prompt("Q?", std::vector<Chunk>{chunks[0]});
  EXPECT_NE(one.find("b#0001"), std::string::npos);
  EXPECT_NE(one.find("Q?"), std::string::npos);
}
