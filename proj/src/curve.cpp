#include "evc/curve.hpp"

namespace evc::bn254 {

Fp G1Curve::b() {
  static const Fp v = Fp::from_u64(3);
  return v;
}

G1 G1Curve::generator() {
  static const G1 g = *G1::from_affine(Fp::from_u64(1), Fp::from_u64(2));
  return g;
}

Fp2 G2Curve::b() {
  static const Fp2 v = Fp2{Fp::from_u64(3), Fp::zero()} * Fp2{Fp::from_u64(9), Fp::one()}.inverse();
  return v;
}

G2 G2Curve::generator() {
  static const G2 g = [] {
    Fp2 x{Fp::from_u256(U256{{0x46debd5cd992f6edULL, 0x674322d4f75edaddULL, 0x426a00665e5c4479ULL,
                              0x1800deef121f1e76ULL}}),
          Fp::from_u256(U256{{0x97e485b7aef312c2ULL, 0xf1aa493335a9e712ULL, 0x7260bfb731fb5d25ULL,
                              0x198e9393920d483aULL}})};
    Fp2 y{Fp::from_u256(U256{{0x4ce6cc0166fa7daaULL, 0xe3d1e7690c43d37bULL, 0x4aab71808dcb408fULL,
                              0x12c85ea5db8c6debULL}}),
          Fp::from_u256(U256{{0x55acdadcd122975bULL, 0xbc4b313370b38ef3ULL, 0xec9e99ad690c3395ULL,
                              0x090689d0585ff075ULL}})};
    return *G2::from_affine(x, y);
  }();
  return g;
}

const U256& g2_cofactor() {
  // 2p - r
  static const U256 h{{0x345f2299c0f9fa8dULL, 0x06ceecda572a2489ULL, 0xb85045b68181585eULL,
                       0x30644e72e131a029ULL}};
  return h;
}

G2 twist_frobenius(const G2& q) {
  Fp2 x, y;
  if (!q.to_affine(x, y)) return q;
  return *G2::from_affine(x.conj() * twist_frobenius_x(), y.conj() * twist_frobenius_y());
}

bool in_g2_subgroup(const G2& q) { return q.mul(Fr::kModulus).is_identity(); }

std::array<std::uint8_t, kG1Bytes> encode(const G1& p) {
  std::array<std::uint8_t, kG1Bytes> out{};
  Fp x, y;
  if (p.to_affine(x, y)) {
    x.to_be_bytes(std::span(out).subspan(0, 32));
    y.to_be_bytes(std::span(out).subspan(32, 32));
  }
  return out;
}

std::array<std::uint8_t, kG2Bytes> encode(const G2& p) {
  std::array<std::uint8_t, kG2Bytes> out{};
  Fp2 x, y;
  if (p.to_affine(x, y)) {
    x.c0.to_be_bytes(std::span(out).subspan(0, 32));
    x.c1.to_be_bytes(std::span(out).subspan(32, 32));
    y.c0.to_be_bytes(std::span(out).subspan(64, 32));
    y.c1.to_be_bytes(std::span(out).subspan(96, 32));
  }
  return out;
}

namespace {
bool all_zero(std::span<const std::uint8_t> b) {
  for (auto v : b) {
    if (v != 0) return false;
  }
  return true;
}
}  // namespace

std::optional<G1> decode_g1(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kG1Bytes) return std::nullopt;
  if (all_zero(bytes)) return G1::identity();
  Fp x, y;
  if (!Fp::from_canonical_be(bytes.subspan(0, 32), x) || !Fp::from_canonical_be(bytes.subspan(32, 32), y)) {
    return std::nullopt;
  }
  return G1::from_affine(x, y);  // G1 has cofactor 1
}

std::optional<G2> decode_g2(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kG2Bytes) return std::nullopt;
  if (all_zero(bytes)) return G2::identity();
  Fp2 x, y;
  if (!Fp::from_canonical_be(bytes.subspan(0, 32), x.c0) || !Fp::from_canonical_be(bytes.subspan(32, 32), x.c1) ||
      !Fp::from_canonical_be(bytes.subspan(64, 32), y.c0) || !Fp::from_canonical_be(bytes.subspan(96, 32), y.c1)) {
    return std::nullopt;
  }
  auto p = G2::from_affine(x, y);
  if (!p || !in_g2_subgroup(*p)) return std::nullopt;
  return p;
}

}  // namespace evc::bn254
