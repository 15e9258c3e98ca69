#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace labflow::knowledge {

using Vector = std::vector<double>;

struct EmbedderSpec {
  std::string id = "hash-bow-256";
  std::size_t dimension = 256;

  friend bool operator==(const EmbedderSpec&, const EmbedderSpec&) = default;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual const EmbedderSpec& spec() const = 0;
  // Unit-normalized vector of spec().dimension entries. EmbedError on texts
  // without any token.
  virtual Vector embed(std::string_view text) const = 0;
};

// Reference embedder: lowercase alphanumeric word tokens, FNV-1a 64-bit hash
// modulo the dimension, token counts per bucket, then L2 normalization.
// Order-invariant by construction.
class HashBowEmbedder final : public Embedder {
 public:
  explicit HashBowEmbedder(EmbedderSpec spec = {});

  const EmbedderSpec& spec() const override { return spec_; }
  Vector embed(std::string_view text) const override;

 private:
  EmbedderSpec spec_;
};

// Resolves "hash-bow-<d>" identifiers; SchemaError for anything else.
std::shared_ptr<const Embedder> make_embedder(const EmbedderSpec& spec);

std::vector<std::string> word_tokens(std::string_view text);

// a.b / (|a| |b|), clamped to [-1, 1]. Identical inputs give exactly 1.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace labflow::knowledge
