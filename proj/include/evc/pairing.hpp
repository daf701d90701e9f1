#pragma once

#include <array>
#include <cstdint>

#include "evc/curve.hpp"
#include "evc/field.hpp"

namespace evc::bn254 {

/// Element of the order-r target group inside Fp12*.
class Gt {
 public:
  Gt() : value_(Fp12::one()) {}
  explicit Gt(const Fp12& v) : value_(v) {}

  static Gt identity() { return {}; }
  bool is_identity() const { return value_.is_one(); }

  friend Gt operator*(const Gt& a, const Gt& b) { return Gt(a.value_ * b.value_); }
  Gt pow(const U256& e) const { return Gt(value_.pow(e)); }
  Gt pow(const Fr& e) const { return pow(e.to_u256()); }
  friend bool operator==(const Gt& a, const Gt& b) { return a.value_ == b.value_; }

  const Fp12& value() const { return value_; }

 private:
  Fp12 value_;
};

constexpr std::size_t kGtBytes = 384;

/// Twelve big-endian Fp coefficients ordered by power of w, each as (c0, c1) of Fp2.
std::array<std::uint8_t, kGtBytes> encode(const Gt& g);

/// Miller loop of the optimal ate pairing (no final exponentiation).
Fp12 miller_loop(const G1& p, const G2& q);
Fp12 final_exponentiation(const Fp12& f);

/// Optimal ate pairing e: G1 x G2 -> Gt.
Gt pairing(const G1& p, const G2& q);

}  // namespace evc::bn254
