#include "evc/group.hpp"

#include "evc/rng.hpp"

namespace evc {

Scalar Scalar::random(Rng& rng) {
  std::array<std::uint8_t, 64> wide;
  for (;;) {
    rng.fill(wide);
    bn254::Fr v = bn254::Fr::from_wide_be(wide);
    if (!v.is_zero()) return Scalar(v);
  }
}

std::optional<Scalar> Scalar::from_bytes(ByteView bytes) {
  if (bytes.size() != kScalarBytes) return std::nullopt;
  bn254::Fr v;
  if (!bn254::Fr::from_canonical_be(bytes, v)) return std::nullopt;
  return Scalar(v);
}

std::array<std::uint8_t, kScalarBytes> Scalar::to_bytes() const {
  std::array<std::uint8_t, kScalarBytes> out;
  value_.to_be_bytes(out);
  return out;
}

GtElement pair(const G1Point& a, const G2Point& b) { return bn254::pairing(a, b); }

}  // namespace evc
