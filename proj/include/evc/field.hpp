#pragma once

// Prime-field and extension-field arithmetic for the BN254 pairing backend.
//
// Fp and Fr are 4x64-bit Montgomery fields. The extension tower is
//   Fp2  = Fp[i]  / (i^2 + 1)
//   Fp6  = Fp2[v] / (v^3 - xi),  xi = 9 + i
//   Fp12 = Fp6[w] / (w^2 - v)
// Nothing here is constant-time.

#include <array>
#include <compare>
#include <cstdint>
#include <span>

namespace evc::bn254 {

struct U256 {
  std::array<std::uint64_t, 4> limb{};  // little-endian limbs

  static constexpr U256 from_u64(std::uint64_t v) { return U256{{v, 0, 0, 0}}; }
  static U256 from_be_bytes(std::span<const std::uint8_t> bytes);  // exactly 32 bytes
  void to_be_bytes(std::span<std::uint8_t> out) const;             // exactly 32 bytes

  constexpr bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }
  constexpr bool bit(unsigned i) const { return (limb[i / 64] >> (i % 64)) & 1; }
  unsigned bit_length() const;

  friend constexpr bool operator==(const U256&, const U256&) = default;
  friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
    }
    return std::strong_ordering::equal;
  }
};

namespace detail {

using u128 = unsigned __int128;

constexpr std::uint64_t add_carry(std::uint64_t a, std::uint64_t b, std::uint64_t& carry) {
  u128 s = u128{a} + b + carry;
  carry = static_cast<std::uint64_t>(s >> 64);
  return static_cast<std::uint64_t>(s);
}

constexpr std::uint64_t sub_borrow(std::uint64_t a, std::uint64_t b, std::uint64_t& borrow) {
  u128 d = u128{a} - b - borrow;
  borrow = static_cast<std::uint64_t>(d >> 64) & 1;
  return static_cast<std::uint64_t>(d);
}

// Returns carry out.
constexpr std::uint64_t add_in_place(U256& a, const U256& b) {
  std::uint64_t c = 0;
  for (int i = 0; i < 4; ++i) a.limb[i] = add_carry(a.limb[i], b.limb[i], c);
  return c;
}

// Returns borrow out.
constexpr std::uint64_t sub_in_place(U256& a, const U256& b) {
  std::uint64_t br = 0;
  for (int i = 0; i < 4; ++i) a.limb[i] = sub_borrow(a.limb[i], b.limb[i], br);
  return br;
}

constexpr U256 compute_r2(const U256& m) {
  // 2^512 mod m by repeated doubling; m < 2^255 so doubling never overflows twice.
  U256 r = U256::from_u64(1);
  for (int i = 0; i < 512; ++i) {
    std::uint64_t carry = add_in_place(r, r);
    if (carry != 0 || r >= m) sub_in_place(r, m);
  }
  return r;
}

constexpr std::uint64_t compute_inv(std::uint64_t m0) {
  std::uint64_t x = 1;
  for (int i = 0; i < 7; ++i) x *= 2 - m0 * x;
  return ~x + 1;  // -m^{-1} mod 2^64
}

}  // namespace detail

U256 sub_u256(U256 a, const U256& b);
U256 div_small(const U256& a, std::uint64_t d, std::uint64_t* rem = nullptr);

/// Montgomery-form element of the prime field defined by Traits::kModulus.
template <class Traits>
class MontField {
 public:
  static constexpr U256 kModulus = Traits::kModulus;
  static constexpr U256 kR2 = detail::compute_r2(kModulus);
  static constexpr std::uint64_t kInv = detail::compute_inv(kModulus.limb[0]);

  constexpr MontField() = default;

  static MontField zero() { return MontField{}; }
  static MontField one() { return from_u256(U256::from_u64(1)); }
  static MontField from_u64(std::uint64_t v) { return from_u256(U256::from_u64(v)); }

  /// Any 256-bit integer; reduced modulo the field prime.
  static MontField from_u256(U256 v) {
    while (v >= kModulus) detail::sub_in_place(v, kModulus);
    MontField r;
    r.v_ = v;
    return r * MontField::raw(kR2);
  }

  /// Reduces a 512-bit big-endian value (64 bytes) modulo the prime.
  static MontField from_wide_be(std::span<const std::uint8_t> bytes64) {
    U256 hi = U256::from_be_bytes(bytes64.subspan(0, 32));
    U256 lo = U256::from_be_bytes(bytes64.subspan(32, 32));
    // hi * 2^256 + lo; 2^256 mod m in Montgomery form is R^2 reduced once: mont(R) = R^2 / R.
    MontField two256 = MontField::raw(kR2).mont_reduce_only();  // == R mod m (canonical)
    return from_u256(hi) * from_u256(two256.v_) + from_u256(lo);
  }

  U256 to_u256() const { return (*this * MontField::raw(U256::from_u64(1))).v_; }

  bool is_zero() const { return v_.is_zero(); }
  friend bool operator==(const MontField& a, const MontField& b) { return a.v_ == b.v_; }

  friend MontField operator+(MontField a, const MontField& b) {
    std::uint64_t carry = detail::add_in_place(a.v_, b.v_);
    if (carry != 0 || a.v_ >= kModulus) detail::sub_in_place(a.v_, kModulus);
    return a;
  }
  friend MontField operator-(MontField a, const MontField& b) {
    if (detail::sub_in_place(a.v_, b.v_) != 0) detail::add_in_place(a.v_, kModulus);
    return a;
  }
  MontField operator-() const { return MontField{} - *this; }
  MontField& operator+=(const MontField& o) { return *this = *this + o; }
  MontField& operator-=(const MontField& o) { return *this = *this - o; }
  MontField& operator*=(const MontField& o) { return *this = *this * o; }

  friend MontField operator*(const MontField& a, const MontField& b) {
    using detail::u128;
    const auto& x = a.v_.limb;
    const auto& y = b.v_.limb;
    const auto& m = kModulus.limb;
    std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      std::uint64_t carry = 0;
      for (int j = 0; j < 4; ++j) {
        u128 s = u128{x[j]} * y[i] + t[j] + carry;
        t[j] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
      }
      u128 s4 = u128{t[4]} + carry;
      t[4] = static_cast<std::uint64_t>(s4);
      t[5] = static_cast<std::uint64_t>(s4 >> 64);

      std::uint64_t k = t[0] * kInv;
      u128 s = u128{k} * m[0] + t[0];
      carry = static_cast<std::uint64_t>(s >> 64);
      for (int j = 1; j < 4; ++j) {
        s = u128{k} * m[j] + t[j] + carry;
        t[j - 1] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
      }
      s = u128{t[4]} + carry;
      t[3] = static_cast<std::uint64_t>(s);
      t[4] = t[5] + static_cast<std::uint64_t>(s >> 64);
    }
    MontField r;
    r.v_ = U256{{t[0], t[1], t[2], t[3]}};
    if (t[4] != 0 || r.v_ >= kModulus) detail::sub_in_place(r.v_, kModulus);
    return r;
  }

  MontField square() const { return *this * *this; }
  MontField dbl() const { return *this + *this; }

  MontField pow(const U256& e) const {
    MontField result = one();
    for (int i = static_cast<int>(e.bit_length()) - 1; i >= 0; --i) {
      result = result.square();
      if (e.bit(static_cast<unsigned>(i))) result *= *this;
    }
    return result;
  }

  /// Multiplicative inverse (binary extended Euclid); inverse of zero is zero.
  MontField inverse() const {
    if (is_zero()) return *this;
    // v_ holds a*R; its integer inverse is a^-1 * R^-1, so scale by R^3 via one Montgomery product.
    static const MontField r3 = MontField::raw(kR2) * MontField::raw(kR2);
    U256 u = v_;
    U256 v = kModulus;
    U256 x1 = U256::from_u64(1);
    U256 x2{};
    auto halve = [](U256& a) {
      for (int i = 0; i < 3; ++i) a.limb[i] = (a.limb[i] >> 1) | (a.limb[i + 1] << 63);
      a.limb[3] >>= 1;
    };
    auto halve_mod = [&](U256& x) {
      if (x.limb[0] & 1) detail::add_in_place(x, kModulus);
      halve(x);
    };
    auto sub_mod = [](U256& a, const U256& b) {
      if (detail::sub_in_place(a, b) != 0) detail::add_in_place(a, kModulus);
    };
    const U256 one_int = U256::from_u64(1);
    while (u != one_int && v != one_int) {
      while ((u.limb[0] & 1) == 0) {
        halve(u);
        halve_mod(x1);
      }
      while ((v.limb[0] & 1) == 0) {
        halve(v);
        halve_mod(x2);
      }
      if (u >= v) {
        detail::sub_in_place(u, v);
        sub_mod(x1, x2);
      } else {
        detail::sub_in_place(v, u);
        sub_mod(x2, x1);
      }
    }
    return MontField::raw(u == one_int ? x1 : x2) * r3;
  }

  /// Canonical big-endian encoding, 32 bytes.
  void to_be_bytes(std::span<std::uint8_t> out) const { to_u256().to_be_bytes(out); }

  /// Parses a canonical encoding; returns false when the value is >= modulus.
  static bool from_canonical_be(std::span<const std::uint8_t> in, MontField& out) {
    U256 v = U256::from_be_bytes(in);
    if (v >= kModulus) return false;
    out = from_u256(v);
    return true;
  }

 private:
  static MontField raw(const U256& v) {
    MontField r;
    r.v_ = v;
    return r;
  }
  MontField mont_reduce_only() const { return *this * raw(U256::from_u64(1)); }

  U256 v_{};
};

struct FpTraits {
  static constexpr U256 kModulus{{0x3c208c16d87cfd47ULL, 0x97816a916871ca8dULL, 0xb85045b68181585dULL,
                                  0x30644e72e131a029ULL}};
};
struct FrTraits {
  static constexpr U256 kModulus{{0x43e1f593f0000001ULL, 0x2833e84879b97091ULL, 0xb85045b68181585dULL,
                                  0x30644e72e131a029ULL}};
};

using Fp = MontField<FpTraits>;
using Fr = MontField<FrTraits>;

/// Square root in Fp (p = 3 mod 4); returns false when none exists.
bool sqrt(const Fp& a, Fp& root);

struct Fp2 {
  Fp c0, c1;  // c0 + c1*i

  static Fp2 zero() { return {}; }
  static Fp2 one() { return {Fp::one(), Fp::zero()}; }
  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  friend bool operator==(const Fp2& a, const Fp2& b) { return a.c0 == b.c0 && a.c1 == b.c1; }

  friend Fp2 operator+(const Fp2& a, const Fp2& b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
  friend Fp2 operator-(const Fp2& a, const Fp2& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
  Fp2 operator-() const { return {-c0, -c1}; }
  friend Fp2 operator*(const Fp2& a, const Fp2& b) {
    Fp t0 = a.c0 * b.c0;
    Fp t1 = a.c1 * b.c1;
    return {t0 - t1, (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1};
  }
  Fp2 operator*(const Fp& s) const { return {c0 * s, c1 * s}; }
  Fp2& operator+=(const Fp2& o) { return *this = *this + o; }
  Fp2& operator-=(const Fp2& o) { return *this = *this - o; }
  Fp2& operator*=(const Fp2& o) { return *this = *this * o; }

  Fp2 square() const {
    Fp t = c0 * c1;
    return {(c0 + c1) * (c0 - c1), t + t};
  }
  Fp2 dbl() const { return *this + *this; }
  Fp2 conj() const { return {c0, -c1}; }
  Fp2 mul_by_xi() const {  // (9 + i) * (c0 + c1 i)
    Fp nine_c0 = c0.dbl().dbl().dbl() + c0;
    Fp nine_c1 = c1.dbl().dbl().dbl() + c1;
    return {nine_c0 - c1, nine_c1 + c0};
  }
  Fp2 inverse() const {
    Fp inv = (c0.square() + c1.square()).inverse();
    return {c0 * inv, -(c1 * inv)};
  }
  Fp2 pow(const U256& e) const {
    Fp2 r = one();
    for (int i = static_cast<int>(e.bit_length()) - 1; i >= 0; --i) {
      r = r.square();
      if (e.bit(static_cast<unsigned>(i))) r *= *this;
    }
    return r;
  }
};

/// Square root in Fp2; returns false when none exists.
bool sqrt(const Fp2& a, Fp2& root);

struct Fp6 {
  Fp2 c0, c1, c2;  // c0 + c1*v + c2*v^2

  static Fp6 zero() { return {}; }
  static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }
  bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  friend bool operator==(const Fp6& a, const Fp6& b) { return a.c0 == b.c0 && a.c1 == b.c1 && a.c2 == b.c2; }

  friend Fp6 operator+(const Fp6& a, const Fp6& b) { return {a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2}; }
  friend Fp6 operator-(const Fp6& a, const Fp6& b) { return {a.c0 - b.c0, a.c1 - b.c1, a.c2 - b.c2}; }
  Fp6 operator-() const { return {-c0, -c1, -c2}; }
  friend Fp6 operator*(const Fp6& a, const Fp6& b) {
    Fp2 t0 = a.c0 * b.c0;
    Fp2 t1 = a.c1 * b.c1;
    Fp2 t2 = a.c2 * b.c2;
    Fp2 r0 = ((a.c1 + a.c2) * (b.c1 + b.c2) - t1 - t2).mul_by_xi() + t0;
    Fp2 r1 = (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1 + t2.mul_by_xi();
    Fp2 r2 = (a.c0 + a.c2) * (b.c0 + b.c2) - t0 - t2 + t1;
    return {r0, r1, r2};
  }
  Fp6 mul_by_v() const { return {c2.mul_by_xi(), c0, c1}; }
  /// Multiplication by b0 + b1*v.
  Fp6 mul_by_01(const Fp2& b0, const Fp2& b1) const {
    Fp2 t0 = c0 * b0;
    Fp2 t1 = c1 * b1;
    return {((c1 + c2) * b1 - t1).mul_by_xi() + t0, (c0 + c1) * (b0 + b1) - t0 - t1, (c0 + c2) * b0 - t0 + t1};
  }
  Fp6 mul_by_fp2(const Fp2& b) const { return {c0 * b, c1 * b, c2 * b}; }
  Fp6 inverse() const {
    Fp2 a = c0.square() - (c1 * c2).mul_by_xi();
    Fp2 b = c2.square().mul_by_xi() - c0 * c1;
    Fp2 c = c1.square() - c0 * c2;
    Fp2 f = c0 * a + ((c2 * b) + (c1 * c)).mul_by_xi();
    Fp2 fi = f.inverse();
    return {a * fi, b * fi, c * fi};
  }
};

struct Fp12 {
  Fp6 c0, c1;  // c0 + c1*w

  static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }
  bool is_one() const { return *this == one(); }
  friend bool operator==(const Fp12& a, const Fp12& b) { return a.c0 == b.c0 && a.c1 == b.c1; }

  friend Fp12 operator*(const Fp12& a, const Fp12& b) {
    Fp6 t0 = a.c0 * b.c0;
    Fp6 t1 = a.c1 * b.c1;
    return {t0 + t1.mul_by_v(), (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1};
  }
  Fp12& operator*=(const Fp12& o) { return *this = *this * o; }
  Fp12 square() const {
    Fp6 t = c0 * c1;
    Fp6 r0 = (c0 + c1) * (c0 + c1.mul_by_v()) - t - t.mul_by_v();
    return {r0, t + t};
  }
  /// Multiplication by a line value a + (b + c*v)*w (coefficients of w^0, w^1, w^3).
  Fp12 mul_by_line(const Fp2& a, const Fp2& b, const Fp2& c) const {
    Fp6 t0 = c0.mul_by_fp2(a);
    Fp6 t1 = c1.mul_by_01(b, c);
    return {t0 + t1.mul_by_v(), (c0 + c1).mul_by_01(a + b, c) - t0 - t1};
  }
  /// Granger-Scott squaring, valid only in the cyclotomic subgroup.
  Fp12 cyclotomic_square() const;
  /// Equals x^(p^6); the inverse for elements of the cyclotomic subgroup.
  Fp12 conj() const { return {c0, -c1}; }
  Fp12 inverse() const {
    Fp6 t = (c0 * c0 - (c1 * c1).mul_by_v()).inverse();
    return {c0 * t, -(c1 * t)};
  }
  Fp12 frobenius() const;
  Fp12 pow(const U256& e) const {
    Fp12 r = one();
    for (int i = static_cast<int>(e.bit_length()) - 1; i >= 0; --i) {
      r = r.square();
      if (e.bit(static_cast<unsigned>(i))) r *= *this;
    }
    return r;
  }

  /// Coefficient of w^k, k in [0, 6).
  const Fp2& coeff(int k) const;
  Fp2& coeff(int k);
};

/// xi^((p-1)/3) and xi^((p-1)/2), used by the Frobenius map on the sextic twist.
const Fp2& twist_frobenius_x();
const Fp2& twist_frobenius_y();

}  // namespace evc::bn254
