#include "labflow/knowledge/knowledge_base.hpp"

#include <algorithm>

#include "labflow/core/errors.hpp"
#include "labflow/core/json_io.hpp"

namespace labflow::knowledge {

KnowledgeBase::KnowledgeBase(std::vector<KnowledgeItem> items, std::shared_ptr<const Embedder> embedder)
    : embedder_(std::move(embedder)) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0 && items[i].key == items_.back()->key) fail(ErrorCode::kDuplicateKey, "duplicate knowledge key '" + items[i].key + "'");
    items[i].embedding = embedder_->embed(items[i].indexed_text());
    index_.emplace(items[i].key, i);
    items_.push_back(std::make_shared<const KnowledgeItem>(std::move(items[i])));
  }
}

bool KnowledgeBase::contains(std::string_view key) const { return index_.find(key) != index_.end(); }

std::shared_ptr<const KnowledgeItem> KnowledgeBase::find(std::string_view key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : items_[it->second];
}

namespace {

std::vector<std::string> string_list(const Json& item, const char* field) {
  if (!item.contains(field)) return {};
  const auto& v = item[field];
  if (!v.is_array()) fail(ErrorCode::kSchema, std::string("knowledge item field '") + field + "' must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) fail(ErrorCode::kSchema, std::string("knowledge item field '") + field + "' must hold strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

KnowledgeBase knowledge_base_from_json(const Json& j, const EmbedderSpec& spec) {
  auto id = require_string(j, "embedder", "knowledge base");
  if (id != spec.id) fail(ErrorCode::kSchema, "knowledge base built for embedder '" + id + "', loader uses '" + spec.id + "'");
  const auto& arr = require(j, "items", "knowledge base");
  if (!arr.is_array()) fail(ErrorCode::kSchema, "knowledge base 'items' must be an array");
  std::vector<KnowledgeItem> items;
  for (const auto& it : arr) {
    KnowledgeItem item;
    item.key = require_string(it, "key", "knowledge item");
    if (item.key.empty()) fail(ErrorCode::kSchema, "knowledge item key must be non-empty");
    item.task_description = require_string(it, "task_description", "knowledge item " + item.key);
    item.verification_prompt = require_string(it, "verification_prompt", "knowledge item " + item.key);
    item.success_examples = string_list(it, "success_examples");
    item.failure_examples = string_list(it, "failure_examples");
    items.push_back(std::move(item));
  }
  return KnowledgeBase(std::move(items), make_embedder(spec));
}

KnowledgeBase load_knowledge_base(const std::filesystem::path& path, const EmbedderSpec& spec) {
  return knowledge_base_from_json(read_json_file(path), spec);
}

RetrievedSet retrieve_topk(const KnowledgeBase& kb, std::string_view query, std::size_t k) {
  if (k == 0) throw std::invalid_argument("retrieve_topk: k must be at least 1");
  if (kb.empty()) fail(ErrorCode::kEmptyKnowledgeBase, "cannot retrieve from an empty knowledge base");
  auto q = kb.embedder().embed(query);

  std::vector<RetrievedEntry> scored;
  scored.reserve(kb.size());
  for (const auto& item : kb.items()) scored.push_back({item->key, cosine_similarity(q, item->embedding), item});

  auto better = [](const RetrievedEntry& a, const RetrievedEntry& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.key < b.key;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return RetrievedSet{std::move(scored), std::string(query)};
}

}  // namespace labflow::knowledge
