#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "labflow/core/vocabulary.hpp"
#include "labflow/knowledge/embedder.hpp"

namespace labflow::knowledge {

struct KnowledgeItem {
  std::string key;
  std::string task_description;
  std::string verification_prompt;
  std::vector<std::string> success_examples;
  std::vector<std::string> failure_examples;
  Vector embedding;  // unit norm, filled on construction of the base

  // Text the embedding is computed over.
  std::string indexed_text() const { return task_description + " " + verification_prompt; }
};

// Immutable once built; share it by const reference or shared_ptr<const>.
class KnowledgeBase {
 public:
  // Embeds every item. DuplicateKey when two items share a key.
  KnowledgeBase(std::vector<KnowledgeItem> items, std::shared_ptr<const Embedder> embedder);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(std::string_view key) const;
  // nullptr when absent.
  std::shared_ptr<const KnowledgeItem> find(std::string_view key) const;
  // Items in ascending key order.
  const std::vector<std::shared_ptr<const KnowledgeItem>>& items() const { return items_; }
  const Embedder& embedder() const { return *embedder_; }
  std::size_t dimension() const { return embedder_->spec().dimension; }

 private:
  std::vector<std::shared_ptr<const KnowledgeItem>> items_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::shared_ptr<const Embedder> embedder_;
};

// File schema: {"embedder":"hash-bow-256","items":[{key, task_description,
// verification_prompt, success_examples, failure_examples}]}.
// Embeddings are always recomputed. IoError, SchemaError, DuplicateKey.
KnowledgeBase load_knowledge_base(const std::filesystem::path& path, const EmbedderSpec& spec = {});
KnowledgeBase knowledge_base_from_json(const Json& j, const EmbedderSpec& spec = {});

struct RetrievedEntry {
  std::string key;
  double similarity = 0.0;
  std::shared_ptr<const KnowledgeItem> item;
};

struct RetrievedSet {
  std::vector<RetrievedEntry> entries;  // similarity descending, ties by ascending key
  std::string query_echo;
};

// Exhaustive scan returning the min(k, size) best items.
// EmptyKnowledgeBase on an empty base; invalid_argument when k == 0.
RetrievedSet retrieve_topk(const KnowledgeBase& kb, std::string_view query, std::size_t k);

}  // namespace labflow::knowledge
