#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "labflow/core/rng.hpp"
#include "labflow/knowledge/embedder.hpp"
#include "labflow/knowledge/knowledge_base.hpp"
#include "support.hpp"

using namespace labflow;
using namespace labflow::knowledge;
namespace lt = labflow::testing;

namespace {

// Independent bag-of-words embedding: FNV-1a over lowercase alphanumeric runs.
std::vector<double> oracle_embed(const std::string& text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : tok) h = (h ^ c) * 1099511628211ULL;
    v[h % dim] += 1.0;
    tok.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) tok += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else flush();
  }
  flush();
  double n = 0;
  for (double x : v) n += x * x;
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

const std::vector<std::string> kWords = {"open",  "close", "lid",   "tube",  "rack",   "centrifuge", "float",
                                         "water", "bath",  "cap",   "pour",  "liquid", "discard",    "trash",
                                         "red",   "orange", "place", "remove", "check", "verify"};

std::string random_text(Rng& rng, int min_words, int max_words) {
  int n = min_words + static_cast<int>(rng.index(static_cast<std::size_t>(max_words - min_words + 1)));
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " " : "") + kWords[rng.index(kWords.size())];
  return s;
}

std::vector<KnowledgeItem> random_items(Rng& rng, std::size_t n) {
  std::vector<KnowledgeItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    KnowledgeItem it;
    it.key = "k" + std::to_string(i);
    it.task_description = random_text(rng, 1, 6);
    it.verification_prompt = random_text(rng, 1, 4);
    items.push_back(it);
  }
  return items;
}

KnowledgeBase make_kb(std::vector<KnowledgeItem> items) {
  return KnowledgeBase(std::move(items), std::make_shared<HashBowEmbedder>());
}

}  // namespace

TEST(Embedder, MatchesIndependentOracle) {
  HashBowEmbedder e;
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    auto text = random_text(rng, 1, 12) + " Tube-15ml, OK!";
    EXPECT_EQ(e.embed(text), oracle_embed(text, 256));
  }
}

TEST(Embedder, UnitNormOrderInvariantAndErrors) {
  HashBowEmbedder e;
  auto a = e.embed("open the centrifuge lid");
  auto b = e.embed("lid centrifuge the open");
  EXPECT_EQ(a, b);
  double n = 0;
  for (double x : a) n += x * x;
  EXPECT_NEAR(n, 1.0, 1e-12);
  EXPECT_CODE(e.embed(" ,.; "), kEmbed);
  EXPECT_CODE(make_embedder(EmbedderSpec{"word2vec", 300}), kSchema);
  EXPECT_NO_THROW(make_embedder(EmbedderSpec{"hash-bow-64", 64}));
}

TEST(Cosine, IdentityAndErrors) {
  std::vector<double> a{0.3, 0.4, 0.5};
  EXPECT_EQ(cosine_similarity(a, a), 1.0);
  std::vector<double> b{1.0, 0.0};
  EXPECT_CODE(cosine_similarity(a, b), kDimensionMismatch);
  std::vector<double> z{0.0, 0.0, 0.0};
  EXPECT_CODE(cosine_similarity(a, z), kZeroVector);
}

TEST(KnowledgeBase, LoadsShippedFiles) {
  auto kb = lt::default_kb();
  EXPECT_EQ(kb->size(), 23u);
  EXPECT_TRUE(kb->contains("insert_tube_to_centrifuge"));
  auto single_tasks = load_knowledge_base(lt::fixtures_dir() / "knowledge_single_tasks.json");
  EXPECT_EQ(single_tasks.size(), 15u);
  for (const auto& item : single_tasks.items()) {
    EXPECT_FALSE(item->verification_prompt.empty());
    EXPECT_FALSE(item->success_examples.empty());
    EXPECT_FALSE(item->failure_examples.empty());
  }
}

TEST(KnowledgeBase, Errors) {
  KnowledgeItem a{"dup", "x", "y", {}, {}, {}};
  EXPECT_CODE(make_kb({a, a}), kDuplicateKey);
  auto empty = make_kb({});
  EXPECT_CODE(retrieve_topk(empty, "open", 3), kEmptyKnowledgeBase);
  auto kb = make_kb({a});
  EXPECT_THROW(retrieve_topk(kb, "open", 0), std::invalid_argument);
  EXPECT_CODE(load_knowledge_base("/nonexistent.json"), kIo);
  EXPECT_CODE(knowledge_base_from_json(Json{{"items", 3}}), kSchema);
}

TEST(Retrieval, SelfRetrievalIsExact) {
  auto single_tasks = load_knowledge_base(lt::fixtures_dir() / "knowledge_single_tasks.json");
  for (const auto& item : single_tasks.items()) {
    auto set = retrieve_topk(single_tasks, item->indexed_text(), 1);
    ASSERT_EQ(set.entries.size(), 1u);
    EXPECT_EQ(set.entries[0].key, item->key);
    EXPECT_EQ(set.entries[0].similarity, 1.0);
  }
}

TEST(Retrieval, KLargerThanBaseReturnsAll) {
  Rng rng(2);
  auto kb = make_kb(random_items(rng, 4));
  EXPECT_EQ(retrieve_topk(kb, "open lid", 10).entries.size(), 4u);
}

// Property: the top-k equals a brute-force cosine ranking with ties broken
// by ascending key.
TEST(Retrieval, MatchesBruteForceRanking) {
  Rng rng(2024);
  for (int base = 0; base < 60; ++base) {
    auto n = 1 + rng.index(300);
    auto kb = make_kb(random_items(rng, n));
    for (int q = 0; q < 3; ++q) {
      auto query = random_text(rng, 1, 8);
      auto k = 1 + rng.index(12);
      auto qv = oracle_embed(query, 256);
      std::vector<std::pair<double, std::string>> scored;
      for (const auto& item : kb.items()) {
        auto iv = oracle_embed(item->indexed_text(), 256);
        double dot = 0, na = 0, nb = 0;
        for (std::size_t i = 0; i < 256; ++i) {
          dot += qv[i] * iv[i];
          na += qv[i] * qv[i];
          nb += iv[i] * iv[i];
        }
        scored.emplace_back(std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0), item->key);
      }
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      auto got = retrieve_topk(kb, query, k);
      ASSERT_EQ(got.entries.size(), std::min<std::size_t>(k, n));
      for (std::size_t i = 0; i < got.entries.size(); ++i) {
        EXPECT_EQ(got.entries[i].key, scored[i].second) << "base " << base << " rank " << i;
        EXPECT_NEAR(got.entries[i].similarity, scored[i].first, 1e-12);
      }
      for (std::size_t i = 1; i < got.entries.size(); ++i) {
        EXPECT_GE(got.entries[i - 1].similarity, got.entries[i].similarity);
      }
    }
  }
}
