#include "evc/bytes.hpp"

#include <algorithm>

#include "evc/errors.hpp"

namespace evc {

Identity make_identity(std::string_view name) {
  if (name.empty() || name.size() > 32) {
    throw Error(ErrorKind::Parameter, "identity name must be 1..32 bytes");
  }
  Identity id{};
  std::copy(name.begin(), name.end(), id.begin());
  return id;
}

std::string identity_name(const Identity& id) {
  auto end = std::find(id.begin(), id.end(), 0);
  bool printable = std::all_of(id.begin(), end, [](std::uint8_t c) { return c >= 0x20 && c < 0x7f; });
  bool zero_tail = std::all_of(end, id.end(), [](std::uint8_t c) { return c == 0; });
  if (printable && zero_tail && end != id.begin()) return std::string(id.begin(), end);
  return to_hex(view(id));
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorKind::Parameter, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorKind::Parameter, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

Bytes concat(std::initializer_list<ByteView> parts) {
  Bytes out;
  for (auto p : parts) append(out, p);
  return out;
}

Digest xor_digest(const Digest& a, const Digest& b) {
  Digest out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

Digest to_digest(ByteView data) {
  if (data.size() != kDigestSize) throw Error(ErrorKind::Parameter, "digest must be 32 bytes");
  Digest d;
  std::copy(data.begin(), data.end(), d.begin());
  return d;
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t get_u64(ByteView data) {
  if (data.size() != 8) throw Error(ErrorKind::Parameter, "u64 field must be 8 bytes");
  std::uint64_t v = 0;
  for (auto b : data) v = (v << 8) | b;
  return v;
}

Digest add_mod_2_256(const Digest& a, const Digest& b) {
  Digest out;
  unsigned carry = 0;
  for (int i = 31; i >= 0; --i) {
    unsigned s = unsigned{a[i]} + unsigned{b[i]} + carry;
    out[i] = static_cast<std::uint8_t>(s);
    carry = s >> 8;
  }
  return out;
}

Digest increment_mod_2_256(const Digest& a) {
  Digest one{};
  one[31] = 1;
  return add_mod_2_256(a, one);
}

bool contains_subsequence(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace evc
