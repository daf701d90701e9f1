#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

constexpr std::size_t kDigestSize = 32;
using Digest = std::array<std::uint8_t, kDigestSize>;

/// Fixed 32-byte entity identity (zero-padded name).
using Identity = std::array<std::uint8_t, 32>;

/// Logical simulation time in milliseconds.
using Millis = std::uint64_t;

Identity make_identity(std::string_view name);
std::string identity_name(const Identity& id);

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

inline ByteView view(const Bytes& b) { return {b.data(), b.size()}; }
template <std::size_t N>
ByteView view(const std::array<std::uint8_t, N>& a) {
  return {a.data(), a.size()};
}

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline void append(Bytes& out, ByteView data) {
  if (data.empty()) return;
  const std::size_t old = out.size();
  out.resize(old + data.size());
  std::memcpy(out.data() + old, data.data(), data.size());
}

Bytes concat(std::initializer_list<ByteView> parts);

Digest xor_digest(const Digest& a, const Digest& b);
Digest to_digest(ByteView data);  // requires exactly 32 bytes

void put_u64(Bytes& out, std::uint64_t v);
std::uint64_t get_u64(ByteView data);

/// Big-endian 256-bit addition modulo 2^256.
Digest add_mod_2_256(const Digest& a, const Digest& b);
Digest increment_mod_2_256(const Digest& a);

bool contains_subsequence(ByteView haystack, ByteView needle);

}  // namespace evc
