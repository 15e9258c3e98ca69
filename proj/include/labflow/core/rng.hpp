#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace labflow {

// Seeded generator handed to stochastic operations by exclusive reference.
// Uniform doubles are built from the top 53 bits of the engine output so the
// stream is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  // One draw in [0, 1).
  double uniform();
  // One draw in [0, n).
  std::size_t index(std::size_t n);

  std::uint64_t draws() const noexcept { return draws_; }

  // Engine state round-trip for persisting suspended runs.
  std::string save() const;
  void restore(const std::string& state, std::uint64_t draws);

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_ && a.draws_ == b.draws_;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace labflow
