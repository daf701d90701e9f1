#include "evc/pairing.hpp"

namespace evc::bn254 {

namespace {

// BN parameter u and the optimal ate loop count 6u + 2.
constexpr U256 kU{{0x44e992b44a6909f1ULL, 0, 0, 0}};
constexpr U256 kAteLoop{{0x9d797039be763ba8ULL, 0x1ULL, 0, 0}};

struct AffineG2 {
  Fp2 x, y;
};

// Homogeneous projective point on the twist: (X : Y : Z) ~ (X/Z, Y/Z).
struct ProjectiveG2 {
  Fp2 x, y, z;
};

// Line value a + b*w + c*w^3. Each step returns the affine line through T scaled by
// an Fp2 factor, which the final exponentiation removes.
struct Line {
  Fp2 a, b, c;
};

const Fp& two_inverse() {
  static const Fp v = Fp::from_u64(2).inverse();
  return v;
}

// Tangent at T, scaled by -2YZ: (-2YZ*yP) + (3X^2*xP) w + (3b'Z^2 - Y^2) w^3.
Line double_step(ProjectiveG2& t, const Fp& xp, const Fp& yp) {
  Fp2 a = (t.x * t.y) * two_inverse();
  Fp2 b = t.y.square();
  Fp2 c = t.z.square();
  Fp2 e = G2Curve::b() * (c.dbl() + c);
  Fp2 f = e.dbl() + e;
  Fp2 g = (b + f) * two_inverse();
  Fp2 h = (t.y + t.z).square() - (b + c);
  Fp2 i = e - b;
  Fp2 j = t.x.square();
  Fp2 e2 = e.square();
  t.x = a * (b - f);
  t.y = g.square() - (e2.dbl() + e2);
  t.z = b * h;
  return {-(h * yp), (j.dbl() + j) * xp, i};
}

// Chord through T and Q, scaled by (X - xQ*Z).
Line add_step(ProjectiveG2& t, const AffineG2& q, const Fp& xp, const Fp& yp) {
  Fp2 theta = t.y - q.y * t.z;
  Fp2 lambda = t.x - q.x * t.z;
  Fp2 c = theta.square();
  Fp2 d = lambda.square();
  Fp2 e = lambda * d;
  Fp2 f = t.z * c;
  Fp2 g = t.x * d;
  Fp2 h = e + f - g.dbl();
  t.x = lambda * h;
  t.y = theta * (g - h) - e * t.y;
  t.z = t.z * e;
  Fp2 j = theta * q.x - lambda * q.y;
  return {lambda * yp, -(theta * xp), j};
}

Fp12 mul(const Fp12& f, const Line& l) { return f.mul_by_line(l.a, l.b, l.c); }

AffineG2 affine(const G2& q) {
  AffineG2 a;
  q.to_affine(a.x, a.y);
  return a;
}

// f^u for f in the cyclotomic subgroup.
Fp12 exp_by_u(const Fp12& f) {
  Fp12 r = f;
  for (int i = static_cast<int>(kU.bit_length()) - 2; i >= 0; --i) {
    r = r.cyclotomic_square();
    if (kU.bit(static_cast<unsigned>(i))) r *= f;
  }
  return r;
}

}  // namespace

std::array<std::uint8_t, kGtBytes> encode(const Gt& g) {
  std::array<std::uint8_t, kGtBytes> out{};
  const Fp12& v = g.value();
  for (int k = 0; k < 6; ++k) {
    const Fp2& c = v.coeff(k);
    c.c0.to_be_bytes(std::span(out).subspan(static_cast<std::size_t>(k) * 64, 32));
    c.c1.to_be_bytes(std::span(out).subspan(static_cast<std::size_t>(k) * 64 + 32, 32));
  }
  return out;
}

Fp12 miller_loop(const G1& p, const G2& q) {
  Fp xp, yp;
  if (!p.to_affine(xp, yp) || q.is_identity()) return Fp12::one();

  const AffineG2 qa = affine(q);
  ProjectiveG2 t{qa.x, qa.y, Fp2::one()};
  Fp12 f = Fp12::one();
  for (int i = static_cast<int>(kAteLoop.bit_length()) - 2; i >= 0; --i) {
    f = mul(f.square(), double_step(t, xp, yp));
    if (kAteLoop.bit(static_cast<unsigned>(i))) f = mul(f, add_step(t, qa, xp, yp));
  }

  const G2 q1 = twist_frobenius(q);
  const G2 q2 = -twist_frobenius(q1);
  f = mul(f, add_step(t, affine(q1), xp, yp));
  f = mul(f, add_step(t, affine(q2), xp, yp));
  return f;
}

Fp12 final_exponentiation(const Fp12& f) {
  // Easy part: f^((p^6 - 1)(p^2 + 1)).
  Fp12 t = f.conj() * f.inverse();
  t = t.frobenius().frobenius() * t;

  // Hard part (p^4 - p^2 + 1) / r as an addition chain in u.
  Fp12 fu = exp_by_u(t);
  Fp12 fu2 = exp_by_u(fu);
  Fp12 fu3 = exp_by_u(fu2);
  Fp12 fp = t.frobenius();
  Fp12 fp2 = fp.frobenius();
  Fp12 fp3 = fp2.frobenius();

  Fp12 y0 = fp * fp2 * fp3;
  Fp12 y1 = t.conj();
  Fp12 y2 = fu2.frobenius().frobenius();
  Fp12 y3 = fu.frobenius().conj();
  Fp12 y4 = (fu * fu2.frobenius()).conj();
  Fp12 y5 = fu2.conj();
  Fp12 y6 = (fu3 * fu3.frobenius()).conj();

  Fp12 t0 = y6.cyclotomic_square() * y4 * y5;
  Fp12 t1 = y3 * y5 * t0;
  t0 = t0 * y2;
  t1 = (t1.cyclotomic_square() * t0).cyclotomic_square();
  t0 = t1 * y1;
  t1 = t1 * y0;
  t0 = t0.cyclotomic_square();
  return t0 * t1;
}

Gt pairing(const G1& p, const G2& q) { return Gt(final_exponentiation(miller_loop(p, q))); }

}  // namespace evc::bn254
