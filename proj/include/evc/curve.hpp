#pragma once

// BN254 groups: G1 = E(Fp): y^2 = x^3 + 3, and G2 = the order-r subgroup of the
// sextic twist E'(Fp2): y^2 = x^3 + 3 / (9 + i). Points are kept in Jacobian
// coordinates; the identity has z == 0.

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "evc/field.hpp"

namespace evc::bn254 {

template <class F, class Curve>
class JacobianPoint {
 public:
  JacobianPoint() : x_(F::one()), y_(F::one()), z_(F::zero()) {}

  static JacobianPoint identity() { return {}; }
  static JacobianPoint generator() { return Curve::generator(); }

  /// Returns nullopt when (x, y) is not on the curve.
  static std::optional<JacobianPoint> from_affine(const F& x, const F& y) {
    JacobianPoint p(x, y, F::one());
    if (!p.on_curve()) return std::nullopt;
    return p;
  }

  bool is_identity() const { return z_.is_zero(); }

  bool on_curve() const {
    if (is_identity()) return true;
    // Y^2 = X^3 + b Z^6
    F z2 = z_.square();
    F z6 = z2.square() * z2;
    return y_.square() == x_.square() * x_ + Curve::b() * z6;
  }

  /// Affine coordinates; false for the identity.
  bool to_affine(F& x, F& y) const {
    if (is_identity()) return false;
    F zi = z_.inverse();
    F zi2 = zi.square();
    x = x_ * zi2;
    y = y_ * zi2 * zi;
    return true;
  }

  JacobianPoint operator-() const { return JacobianPoint(x_, -y_, z_); }

  JacobianPoint dbl() const {
    if (is_identity()) return *this;
    F a = x_.square();
    F b = y_.square();
    F c = b.square();
    F d = ((x_ + b).square() - a - c).dbl();
    F e = a.dbl() + a;
    F f = e.square();
    F x3 = f - d.dbl();
    F c8 = c.dbl().dbl().dbl();
    F y3 = e * (d - x3) - c8;
    F z3 = (y_ * z_).dbl();
    return JacobianPoint(x3, y3, z3);
  }

  friend JacobianPoint operator+(const JacobianPoint& p, const JacobianPoint& q) {
    if (p.is_identity()) return q;
    if (q.is_identity()) return p;
    F z1z1 = p.z_.square();
    F z2z2 = q.z_.square();
    F u1 = p.x_ * z2z2;
    F u2 = q.x_ * z1z1;
    F s1 = p.y_ * q.z_ * z2z2;
    F s2 = q.y_ * p.z_ * z1z1;
    F h = u2 - u1;
    F r = (s2 - s1).dbl();
    if (h.is_zero()) {
      if (r.is_zero()) return p.dbl();
      return identity();
    }
    F i = h.dbl().square();
    F j = h * i;
    F v = u1 * i;
    F x3 = r.square() - j - v.dbl();
    F y3 = r * (v - x3) - (s1 * j).dbl();
    F z3 = ((p.z_ + q.z_).square() - z1z1 - z2z2) * h;
    return JacobianPoint(x3, y3, z3);
  }
  friend JacobianPoint operator-(const JacobianPoint& p, const JacobianPoint& q) { return p + (-q); }
  JacobianPoint& operator+=(const JacobianPoint& o) { return *this = *this + o; }

  JacobianPoint mul(const U256& k) const {
    JacobianPoint acc;
    for (int i = static_cast<int>(k.bit_length()) - 1; i >= 0; --i) {
      acc = acc.dbl();
      if (k.bit(static_cast<unsigned>(i))) acc += *this;
    }
    return acc;
  }
  JacobianPoint mul(const Fr& k) const { return mul(k.to_u256()); }

  friend bool operator==(const JacobianPoint& p, const JacobianPoint& q) {
    if (p.is_identity() || q.is_identity()) return p.is_identity() && q.is_identity();
    F z1z1 = p.z_.square();
    F z2z2 = q.z_.square();
    if (p.x_ * z2z2 != q.x_ * z1z1) return false;
    return p.y_ * q.z_ * z2z2 == q.y_ * p.z_ * z1z1;
  }

 private:
  JacobianPoint(const F& x, const F& y, const F& z) : x_(x), y_(y), z_(z) {}

  F x_, y_, z_;
};

struct G1Curve;
struct G2Curve;
using G1 = JacobianPoint<Fp, G1Curve>;
using G2 = JacobianPoint<Fp2, G2Curve>;

struct G1Curve {
  static Fp b();
  static G1 generator();
};

struct G2Curve {
  static Fp2 b();
  static G2 generator();
};

/// #E'(Fp2) / r for the twist.
const U256& g2_cofactor();

/// Frobenius endomorphism on the twist; acts as multiplication by p on G2.
G2 twist_frobenius(const G2& q);

bool in_g2_subgroup(const G2& q);

constexpr std::size_t kG1Bytes = 64;
constexpr std::size_t kG2Bytes = 128;

/// x || y big-endian; the identity encodes as 64 zero bytes.
std::array<std::uint8_t, kG1Bytes> encode(const G1& p);
/// x.c0 || x.c1 || y.c0 || y.c1; the identity encodes as 128 zero bytes.
std::array<std::uint8_t, kG2Bytes> encode(const G2& p);

std::optional<G1> decode_g1(std::span<const std::uint8_t> bytes);
/// Also enforces membership in the order-r subgroup.
std::optional<G2> decode_g2(std::span<const std::uint8_t> bytes);

}  // namespace evc::bn254
