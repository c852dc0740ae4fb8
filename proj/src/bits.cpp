// SPDX-License-Identifier: Apache-2.0
#include "fflock/bits.hpp"

#include "fflock/error.hpp"

namespace fflock {

std::string to_string(const Bits& bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

Bits bits_from_string(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw Error(ErrorKind::InvalidArgument, "not a bit string: '" + std::string(text) + "'");
    }
    out.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

std::size_t popcount(const Bits& bits) {
  std::size_t n = 0;
  for (auto b : bits) n += b ? 1 : 0;
  return n;
}

std::size_t hamming(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::WidthMismatch, "hamming: width mismatch");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] != b[i]) ? 1 : 0;
  return n;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = engine_();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      x = engine_();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

Bits Rng::bits(std::size_t n) {
  Bits out(n);
  for (auto& b : out) b = coin() ? 1 : 0;
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose) {
  // FNV-1a over the tag, folded into a splitmix64 finalizer.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fflock
