#pragma once

#include <set>

#include "evc/ibe.hpp"
#include "evc/pke.hpp"
#include "evc/protocol.hpp"
#include "evc/rng.hpp"
#include "evc/wire.hpp"

namespace evc {

enum class EntityKind { CSPA, EV };

/// Registration authority: holds the master secret, extracts keys and issues pseudonyms.
class RegistrationAuthority {
 public:
  RegistrationAuthority(SystemParams params, Scalar master_secret, ProtocolConfig cfg, Rng rng);

  const SystemParams& params() const { return params_; }
  const G1Point& public_key() const { return keys_.public_key; }
  const RaRegistry& registry() const { return registry_; }

  /// m1 -> m2 (CSPA) or m3 -> m4 (EV), on plaintext messages.
  WireMessage ra_register(EntityKind kind, const WireMessage& m, Millis now);

  /// Wire-level form: opens the PKE envelope, registers, and seals the reply to `reply_to`.
  Bytes handle_registration(MessageTag tag, ByteView sealed, const G1Point& reply_to, Millis now);

 private:
  SystemParams params_;
  Scalar master_secret_;
  ProtocolConfig cfg_;
  Rng rng_;
  StaticKeyPair keys_;
  RaRegistry registry_;
  std::set<Identity> cspas_;
};

}  // namespace evc
