#include "evc/hash.hpp"

#include <openssl/sha.h>

#include <algorithm>

#include "evc/errors.hpp"

namespace evc {

namespace {

Bytes tagged_prefix(std::string_view tag) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(tag.size()));
  out.insert(out.end(), tag.begin(), tag.end());
  return out;
}

Digest tagged(std::string_view tag, ByteView data) {
  Bytes buf = tagged_prefix(tag);
  append(buf, data);
  return sha256(view(buf));
}

Bytes counter_then(std::uint32_t ctr, ByteView data) {
  Bytes out(4 + data.size());
  for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(ctr >> (24 - 8 * i));
  std::copy(data.begin(), data.end(), out.begin() + 4);
  return out;
}

bool is_odd(const bn254::Fp& v) { return (v.to_u256().limb[0] & 1) != 0; }

G1Point hash_to_g1(const std::string& tag, ByteView id) {
  for (std::uint32_t ctr = 0;; ++ctr) {
    Bytes e = expand_message(tag + "/G1", view(counter_then(ctr, id)), 65);
    bn254::Fp x = bn254::Fp::from_wide_be(ByteView(e).subspan(0, 64));
    bn254::Fp rhs = x.square() * x + bn254::G1Curve::b();
    bn254::Fp y;
    if (!bn254::sqrt(rhs, y)) continue;
    if (is_odd(y) != ((e[64] & 1) != 0)) y = -y;
    auto p = G1Point::from_affine(x, y);
    if (p) return *p;
  }
}

G2Point hash_to_g2(const std::string& tag, ByteView id) {
  for (std::uint32_t ctr = 0;; ++ctr) {
    Bytes e = expand_message(tag + "/G2", view(counter_then(ctr, id)), 129);
    bn254::Fp2 x{bn254::Fp::from_wide_be(ByteView(e).subspan(0, 64)),
                 bn254::Fp::from_wide_be(ByteView(e).subspan(64, 64))};
    bn254::Fp2 rhs = x.square() * x + bn254::G2Curve::b();
    bn254::Fp2 y;
    if (!bn254::sqrt(rhs, y)) continue;
    if (is_odd(y.c0) != ((e[128] & 1) != 0)) y = -y;
    auto p = G2Point::from_affine(x, y);
    if (!p) continue;
    G2Point q = p->mul(bn254::g2_cofactor());
    if (!q.is_identity()) return q;
  }
}

void require_nonempty(ByteView data, const char* what) {
  if (data.empty()) throw Error(ErrorKind::Parameter, std::string(what) + ": empty input");
}

}  // namespace

Digest sha256(ByteView data) {
  Digest out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Bytes expand_message(std::string_view tag, ByteView data, std::size_t length) {
  Bytes out;
  out.reserve(length + kDigestSize);
  for (std::uint32_t block = 0; out.size() < length; ++block) {
    Digest d = tagged(tag, view(counter_then(block, data)));
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(length);
  return out;
}

PairedIdentityPoint hash_to_identity_point(const HashTags& tags, ByteView id) {
  require_nonempty(id, "H1");
  return {hash_to_g1(tags.h1, id), hash_to_g2(tags.h1, id)};
}

Scalar hash_to_scalar(const HashTags& tags, ByteView data) {
  require_nonempty(data, "H2");
  for (std::uint32_t ctr = 0;; ++ctr) {
    Bytes wide = expand_message(tags.h2, view(counter_then(ctr, data)), 64);
    bn254::Fr v = bn254::Fr::from_wide_be(view(wide));
    if (!v.is_zero()) return Scalar(v);
  }
}

Digest hash_to_digest(const HashTags& tags, ByteView data) { return tagged(tags.h3, data); }

Digest pseudonym_hash(const HashTags& tags, ByteView data) { return tagged(tags.h4, data); }

Digest iterate_digest(const HashTags& tags, const Digest& start, std::size_t count) {
  Digest v = start;
  for (std::size_t i = 0; i < count; ++i) v = hash_to_digest(tags, view(v));
  return v;
}

G2Point eow_hash(const G2Point& p, const Scalar& x) {
  if (x.is_zero()) throw Error(ErrorKind::Parameter, "eow_hash: scalar must be nonzero");
  return x * p;
}

G1Point eow_hash(const G1Point& p, const Scalar& x) {
  if (x.is_zero()) throw Error(ErrorKind::Parameter, "eow_hash: scalar must be nonzero");
  return x * p;
}

}  // namespace evc
