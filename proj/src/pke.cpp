#include "evc/pke.hpp"

#include "evc/aead.hpp"
#include "evc/errors.hpp"
#include "evc/hash.hpp"
#include "evc/rng.hpp"

namespace evc {

namespace {

AeadKey derive_key(const G1Point& ephemeral, const G1Point& shared) {
  Bytes material;
  append(material, as_bytes("EVC/pke"));
  append(material, view(encode(ephemeral)));
  append(material, view(encode(shared)));
  return sha256(view(material));
}

}  // namespace

StaticKeyPair StaticKeyPair::generate(Rng& rng) {
  Scalar s = Scalar::random(rng);
  return {s, s * G1Point::generator()};
}

Bytes pke_seal(const G1Point& recipient, ByteView plaintext, Rng& rng) {
  Scalar e = Scalar::random(rng);
  G1Point ephemeral = e * G1Point::generator();
  auto eph_bytes = encode(ephemeral);
  AeadNonce nonce;
  rng.fill(nonce);
  Bytes out(eph_bytes.begin(), eph_bytes.end());
  append(out, view(nonce));
  append(out, view(aead_seal(derive_key(ephemeral, e * recipient), nonce, view(eph_bytes), plaintext)));
  return out;
}

Bytes pke_open(const StaticKeyPair& keys, ByteView envelope) {
  if (envelope.size() < kPkeOverhead) throw DecodeError("pke_envelope", "too short");
  auto eph = decode_g1(envelope.subspan(0, kG1Bytes));
  if (!eph || eph->is_identity()) throw Error(ErrorKind::EnvelopeAuth, "pke envelope: bad ephemeral point");
  AeadNonce nonce;
  std::copy_n(envelope.begin() + kG1Bytes, nonce.size(), nonce.begin());
  auto pt = aead_open(derive_key(*eph, keys.secret * *eph), nonce, envelope.subspan(0, kG1Bytes),
                      envelope.subspan(kG1Bytes + nonce.size()));
  if (!pt) throw Error(ErrorKind::EnvelopeAuth, "pke envelope authentication failed");
  return *pt;
}

}  // namespace evc
