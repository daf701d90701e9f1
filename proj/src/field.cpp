#include "evc/field.hpp"

#include <bit>

namespace evc::bn254 {

U256 U256::from_be_bytes(std::span<const std::uint8_t> bytes) {
  U256 r;
  for (int i = 0; i < 4; ++i) {
    std::uint64_t w = 0;
    for (int j = 0; j < 8; ++j) w = (w << 8) | bytes[static_cast<std::size_t>((3 - i) * 8 + j)];
    r.limb[static_cast<std::size_t>(i)] = w;
  }
  return r;
}

void U256::to_be_bytes(std::span<std::uint8_t> out) const {
  for (int i = 0; i < 4; ++i) {
    std::uint64_t w = limb[static_cast<std::size_t>(i)];
    for (int j = 7; j >= 0; --j) {
      out[static_cast<std::size_t>((3 - i) * 8 + j)] = static_cast<std::uint8_t>(w);
      w >>= 8;
    }
  }
}

unsigned U256::bit_length() const {
  for (int i = 3; i >= 0; --i) {
    if (limb[static_cast<std::size_t>(i)] != 0) {
      return static_cast<unsigned>(i * 64 + 64 - std::countl_zero(limb[static_cast<std::size_t>(i)]));
    }
  }
  return 0;
}

U256 sub_u256(U256 a, const U256& b) {
  detail::sub_in_place(a, b);
  return a;
}

U256 div_small(const U256& a, std::uint64_t d, std::uint64_t* rem) {
  U256 q;
  detail::u128 r = 0;
  for (int i = 3; i >= 0; --i) {
    detail::u128 cur = (r << 64) | a.limb[static_cast<std::size_t>(i)];
    q.limb[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(cur / d);
    r = cur % d;
  }
  if (rem != nullptr) *rem = static_cast<std::uint64_t>(r);
  return q;
}

namespace {

const U256& p_minus_3_over_4() {
  static const U256 v = div_small(sub_u256(Fp::kModulus, U256::from_u64(3)), 4);
  return v;
}
const U256& p_plus_1_over_4() {
  // (p + 1) / 4 == (p - 3) / 4 + 1
  static const U256 v = [] {
    U256 t = p_minus_3_over_4();
    detail::add_in_place(t, U256::from_u64(1));
    return t;
  }();
  return v;
}
const U256& p_minus_1_over_2() {
  static const U256 v = div_small(sub_u256(Fp::kModulus, U256::from_u64(1)), 2);
  return v;
}

const Fp2& xi() {
  static const Fp2 v{Fp::from_u64(9), Fp::one()};
  return v;
}

const std::array<Fp2, 6>& frobenius_coeffs() {
  static const std::array<Fp2, 6> c = [] {
    std::array<Fp2, 6> out;
    U256 e = div_small(sub_u256(Fp::kModulus, U256::from_u64(1)), 6);
    Fp2 base = xi().pow(e);
    out[0] = Fp2::one();
    for (int k = 1; k < 6; ++k) out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k - 1)] * base;
    return out;
  }();
  return c;
}

}  // namespace

bool sqrt(const Fp& a, Fp& root) {
  Fp r = a.pow(p_plus_1_over_4());
  if (r.square() != a) return false;
  root = r;
  return true;
}

bool sqrt(const Fp2& a, Fp2& root) {
  if (a.is_zero()) {
    root = Fp2::zero();
    return true;
  }
  Fp2 a1 = a.pow(p_minus_3_over_4());
  Fp2 alpha = a1.square() * a;
  Fp2 a0 = alpha.conj() * alpha;
  Fp2 minus_one{-Fp::one(), Fp::zero()};
  if (a0 == minus_one) return false;
  Fp2 x0 = a1 * a;
  Fp2 x;
  if (alpha == minus_one) {
    x = Fp2{-x0.c1, x0.c0};
  } else {
    Fp2 b = (Fp2::one() + alpha).pow(p_minus_1_over_2());
    x = b * x0;
  }
  if (x.square() != a) return false;
  root = x;
  return true;
}

const Fp2& Fp12::coeff(int k) const {
  const Fp6& half = (k % 2 == 0) ? c0 : c1;
  switch (k / 2) {
    case 0: return half.c0;
    case 1: return half.c1;
    default: return half.c2;
  }
}

Fp2& Fp12::coeff(int k) {
  return const_cast<Fp2&>(static_cast<const Fp12&>(*this).coeff(k));
}

Fp12 Fp12::frobenius() const {
  const auto& g = frobenius_coeffs();
  Fp12 r;
  for (int k = 0; k < 6; ++k) r.coeff(k) = coeff(k).conj() * g[static_cast<std::size_t>(k)];
  return r;
}

namespace {

// (a + b*s)^2 in Fp4 = Fp2[s]/(s^2 - xi).
void fp4_square(const Fp2& a, const Fp2& b, Fp2& c0, Fp2& c1) {
  Fp2 t0 = a.square();
  Fp2 t1 = b.square();
  c0 = t1.mul_by_xi() + t0;
  c1 = (a + b).square() - t0 - t1;
}

}  // namespace

Fp12 Fp12::cyclotomic_square() const {
  Fp2 z0 = c0.c0, z4 = c0.c1, z3 = c0.c2;
  Fp2 z2 = c1.c0, z1 = c1.c1, z5 = c1.c2;
  Fp2 t0, t1, t2, t3;

  fp4_square(z0, z1, t0, t1);
  z0 = t0 - z0;
  z0 = z0.dbl() + t0;
  z1 = t1 + z1;
  z1 = z1.dbl() + t1;

  fp4_square(z2, z3, t0, t1);
  fp4_square(z4, z5, t2, t3);
  z4 = t0 - z4;
  z4 = z4.dbl() + t0;
  z5 = t1 + z5;
  z5 = z5.dbl() + t1;

  t0 = t3.mul_by_xi();
  z2 = t0 + z2;
  z2 = z2.dbl() + t0;
  z3 = t2 - z3;
  z3 = z3.dbl() + t2;

  return {{z0, z4, z3}, {z2, z1, z5}};
}

const Fp2& twist_frobenius_x() {
  static const Fp2 v = frobenius_coeffs()[2];  // xi^((p-1)/3)
  return v;
}

const Fp2& twist_frobenius_y() {
  static const Fp2 v = frobenius_coeffs()[3];  // xi^((p-1)/2)
  return v;
}

}  // namespace evc::bn254
