#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evc/billing.hpp"
#include "evc/hashchain.hpp"
#include "evc/ibe.hpp"
#include "evc/pke.hpp"
#include "evc/protocol.hpp"
#include "evc/rng.hpp"
#include "evc/wire.hpp"

namespace evc {

/// Per-RSU charging state held by the EV while it drives through a segment.
struct SegmentSession {
  std::uint32_t rsu = 0;
  Digest n_rsu{};
  std::uint8_t rate = 0;
  std::uint32_t pads = 0;
  ChainState chain;
  std::size_t step = 0;
  bool terminated = false;
};

/// Electric vehicle with its tamper-proof OBU.
class Vehicle {
 public:
  Vehicle(SystemParams params, Identity id, ProtocolConfig cfg, Rng rng, G1Point ra_public_key,
          G1Point bank_public_key);

  const Identity& id() const { return id_; }
  const G1Point& public_key() const { return keys_.public_key; }
  bool registered() const { return key_.has_value(); }
  const std::vector<PseudonymRecord>& pseudonyms() const { return pseudonyms_; }
  std::size_t pseudonyms_left() const { return pseudonyms_.size() - next_pseudonym_; }

  WireMessage registration_message(Millis now) const;
  Bytes registration_request(Millis now);
  void on_registration_reply(ByteView sealed_m4, Millis now);

  /// Adversary hook: random pseudonyms and keys the RA never issued.
  void forge_credentials(std::size_t count);

  /// m3' for the pseudonym the next handshake will use.
  Bytes ticket_request(Millis now);
  void on_ticket(ByteView sealed_m4b, Millis now);

  /// Starts a handshake. Consumes a fresh pseudonym unless `reuse_pseudonym` is set.
  WireMessage ev_begin_auth(Millis now, bool reuse_pseudonym = false);
  /// m6 -> m7 (IBE ciphertext bytes for ID_CSPA).
  Bytes ev_compute_mac(const WireMessage& m6, Millis now);
  /// Checks m8; on success the session is Established and the token is unmasked.
  Phase ev_verify_cspa(const WireMessage& m8, Millis now);

  const SessionState& session() const { return session_; }
  const std::optional<Digest>& token_hash() const { return token_hash_; }

  /// m10 sealed under the session key.
  Bytes ev_request_rsu(std::uint32_t rsu, Millis now);
  /// Checks m11 and builds the hash chain for the segment of `pads` pads.
  void on_rsu_admit(std::uint32_t rsu, std::uint32_t pads, ByteView sealed_m11, Millis now);
  /// Next m13 for the current segment.
  WireMessage next_pad_value();
  /// Power delivered by a pad of the current segment.
  void on_power();
  /// m15 for the current segment.
  WireMessage terminate();
  const std::optional<SegmentSession>& segment() const { return segment_; }

  /// Checks a Bank bill against the oldest unbilled session meter.
  BillCheck on_bill(ByteView sealed_m19, Millis now);
  BillCheck on_bill(const WireMessage& m19);
  const ObuMeter& meter() const;

 private:
  const PseudonymRecord& current_pseudonym() const;

  SystemParams params_;
  Identity id_;
  ProtocolConfig cfg_;
  Rng rng_;
  G1Point ra_pk_, bank_pk_;
  StaticKeyPair keys_;
  std::optional<IdPrivateKey> key_;
  std::vector<PseudonymRecord> pseudonyms_;
  std::size_t next_pseudonym_ = 0;
  std::optional<std::size_t> active_pseudonym_;
  std::map<Digest, TicketBytes> tickets_;
  SessionState session_;
  std::optional<Digest> token_hash_;
  std::optional<SegmentSession> segment_;
  std::deque<ObuMeter> meters_;  // one per authenticated session, billed in order
};

}  // namespace evc
