#include "labflow/knowledge/embedder.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>

#include "labflow/core/errors.hpp"

namespace labflow::knowledge {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

HashBowEmbedder::HashBowEmbedder(EmbedderSpec spec) : spec_(std::move(spec)) {
  if (spec_.dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

Vector HashBowEmbedder::embed(std::string_view text) const {
  auto tokens = word_tokens(text);
  if (tokens.empty()) fail(ErrorCode::kEmbed, "text has no word tokens");
  Vector v(spec_.dimension, 0.0);
  for (const auto& t : tokens) v[fnv1a(t) % spec_.dimension] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderSpec& spec) {
  constexpr std::string_view prefix = "hash-bow-";
  if (spec.id.rfind(prefix, 0) == 0) {
    std::size_t d = 0;
    auto digits = std::string_view(spec.id).substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && d == spec.dimension && d > 0) {
      return std::make_shared<HashBowEmbedder>(spec);
    }
  }
  fail(ErrorCode::kSchema, "unsupported embedder '" + spec.id + "' (dimension " + std::to_string(spec.dimension) + ")");
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kDimensionMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  // sqrt(na * na) == na exactly in IEEE arithmetic, so sim(v, v) is exactly 1.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace labflow::knowledge
