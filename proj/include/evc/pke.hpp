#pragma once

// Hybrid public-key envelope for the registration and settlement messages
// (m1-m4, m3'/m4', m18, m19). ECIES over the source group with AES-256-GCM.

#include "evc/bytes.hpp"
#include "evc/group.hpp"

namespace evc {

class Rng;

struct StaticKeyPair {
  Scalar secret;
  G1Point public_key;

  static StaticKeyPair generate(Rng& rng);
};

/// Wire form: ephemeral point (64) || nonce (12) || ciphertext || tag (16).
Bytes pke_seal(const G1Point& recipient, ByteView plaintext, Rng& rng);
/// Throws EnvelopeAuth if the envelope was not sealed to `keys` or was modified.
Bytes pke_open(const StaticKeyPair& keys, ByteView envelope);

constexpr std::size_t kPkeOverhead = 64 + 12 + 16;

}  // namespace evc
