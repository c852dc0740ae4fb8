// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fflock {

// One byte per bit, each holding 0 or 1. Index 0 is the first bit written in
// a bit string.
using Bits = std::vector<std::uint8_t>;

std::string to_string(const Bits& bits);
Bits bits_from_string(std::string_view text);
std::size_t popcount(const Bits& bits);
std::size_t hamming(const Bits& a, const Bits& b);

// Seeded generator with a portable bounded draw; std distributions are
// implementation-defined, so every sampling decision goes through here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  bool coin() { return (engine_() >> 63) != 0; }
  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  Bits bits(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derive an independent stream seed from a base seed and a purpose tag.
std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose);

}  // namespace fflock
