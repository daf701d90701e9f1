#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "evc/bytes.hpp"

namespace evc {

/// Deterministic byte generator: SHA-256 over (seed key || block counter).
/// Every simulation entity owns one, derived from the scenario seed, so runs replay exactly.
class Rng {
 public:
  explicit Rng(ByteView seed);
  static Rng from_string(std::string_view seed);

  /// Independent child stream for `label`.
  Rng derive(std::string_view label) const;

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  Digest digest();
  std::uint64_t next_u64();

 private:
  void refill();

  Digest key_{};
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = kDigestSize;
};

}  // namespace evc
