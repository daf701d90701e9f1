#pragma once

#include <array>
#include <optional>

#include "evc/bytes.hpp"
#include "evc/pairing.hpp"

namespace evc {

class Rng;

using G1Point = bn254::G1;   // source group
using G2Point = bn254::G2;   // mirror group
using GtElement = bn254::Gt;

constexpr std::size_t kScalarBytes = 32;
constexpr std::size_t kG1Bytes = bn254::kG1Bytes;
constexpr std::size_t kG2Bytes = bn254::kG2Bytes;
constexpr std::size_t kGtBytes = bn254::kGtBytes;

/// Integer modulo the group order q.
class Scalar {
 public:
  Scalar() = default;
  explicit Scalar(const bn254::Fr& v) : value_(v) {}
  static Scalar from_u64(std::uint64_t v) { return Scalar(bn254::Fr::from_u64(v)); }

  /// Uniform in [1, q-1].
  static Scalar random(Rng& rng);

  /// Canonical 32-byte big-endian; rejects values >= q.
  static std::optional<Scalar> from_bytes(ByteView bytes);
  std::array<std::uint8_t, kScalarBytes> to_bytes() const;

  bool is_zero() const { return value_.is_zero(); }
  const bn254::Fr& value() const { return value_; }

  friend Scalar operator*(const Scalar& a, const Scalar& b) { return Scalar(a.value_ * b.value_); }
  friend Scalar operator+(const Scalar& a, const Scalar& b) { return Scalar(a.value_ + b.value_); }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.value_ == b.value_; }

 private:
  bn254::Fr value_;
};

inline G1Point operator*(const Scalar& k, const G1Point& p) { return p.mul(k.value()); }
inline G2Point operator*(const Scalar& k, const G2Point& p) { return p.mul(k.value()); }

GtElement pair(const G1Point& a, const G2Point& b);

using bn254::decode_g1;
using bn254::decode_g2;
using bn254::encode;

}  // namespace evc
