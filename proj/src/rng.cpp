#include "evc/rng.hpp"

#include <algorithm>

#include "evc/hash.hpp"

namespace evc {

Rng::Rng(ByteView seed) {
  Bytes material;
  const std::string_view tag = "EVC/rng/seed";
  material.insert(material.end(), tag.begin(), tag.end());
  append(material, seed);
  key_ = sha256(view(material));
}

Rng Rng::from_string(std::string_view seed) {
  return Rng(ByteView(reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size()));
}

Rng Rng::derive(std::string_view label) const {
  Bytes material(key_.begin(), key_.end());
  material.push_back('/');
  material.insert(material.end(), label.begin(), label.end());
  return Rng(view(material));
}

void Rng::refill() {
  Bytes block(key_.begin(), key_.end());
  put_u64(block, counter_++);
  block_ = sha256(view(block));
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == kDigestSize) refill();
    std::size_t take = std::min(kDigestSize - used_, out.size() - pos);
    std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(used_), take, out.begin() + static_cast<std::ptrdiff_t>(pos));
    used_ += take;
    pos += take;
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

Digest Rng::digest() {
  Digest d;
  fill(d);
  return d;
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b;
  fill(b);
  return get_u64(view(b));
}

}  // namespace evc
