#pragma once

// The four protocol hash functions plus the commutative e-one-way hash h.
//
//   H1: bytes -> (G1, G2)       identity points, hashed into both pairing groups
//   H2: bytes -> Z*_q
//   H3: bytes -> 32-byte digest (also the chain hash h(.) on byte strings)
//   H4: bytes -> 32-byte digest (pseudonyms)
//
// Each function prefixes its own domain tag, so identical inputs never collide across functions.

#include <string>

#include "evc/bytes.hpp"
#include "evc/group.hpp"

namespace evc {

Digest sha256(ByteView data);

struct HashTags {
  std::string h1 = "EVC/H1/identity-point";
  std::string h2 = "EVC/H2/scalar";
  std::string h3 = "EVC/H3/digest";
  std::string h4 = "EVC/H4/pseudonym";

  friend bool operator==(const HashTags&, const HashTags&) = default;
};

struct PairedIdentityPoint {
  G1Point in_g1;
  G2Point in_g2;
};

/// SHA-256 based expansion of (tag, data) to `length` bytes.
Bytes expand_message(std::string_view tag, ByteView data, std::size_t length);

PairedIdentityPoint hash_to_identity_point(const HashTags& tags, ByteView id);
Scalar hash_to_scalar(const HashTags& tags, ByteView data);
Digest hash_to_digest(const HashTags& tags, ByteView data);
Digest pseudonym_hash(const HashTags& tags, ByteView data);

/// Iterates the chain hash: h^count(data). h^0(x) is x itself only for 32-byte x;
/// callers building chains from longer bases always apply at least one step.
Digest iterate_digest(const HashTags& tags, const Digest& start, std::size_t count);

/// Commutative e-one-way hash h(P, x) = x * P; satisfies h(aP, x) = a * h(P, x).
G2Point eow_hash(const G2Point& p, const Scalar& x);
G1Point eow_hash(const G1Point& p, const Scalar& x);

}  // namespace evc
