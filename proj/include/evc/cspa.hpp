#pragma once

#include <map>
#include <string>
#include <vector>

#include "evc/billing.hpp"
#include "evc/ibe.hpp"
#include "evc/pke.hpp"
#include "evc/protocol.hpp"
#include "evc/rng.hpp"
#include "evc/wire.hpp"

namespace evc {

struct TokenIssue {
  WireMessage m8;
  WireMessage m9;
  Bytes sealed_m9;  // under GK_RSU-CSPA, fanned out to every RSU
  Digest pid{};
  Digest token_hash{};
  Token token;
};

struct CostReport {
  Digest pid{};
  Digest token_hash{};
  std::uint32_t rsu_id = 0;
  std::uint64_t cost = 0;
  std::uint64_t total = 0;
};

struct SettlementOrder {
  Digest pid{};
  Digest token_hash{};
  TicketBytes ticket{};
  std::uint64_t total = 0;
  WireMessage m18;
  Bytes sealed_m18;  // to the Bank
};

/// Charging service provider authority: authenticates EVs, issues tokens, aggregates costs.
class ChargingAuthority {
 public:
  ChargingAuthority(SystemParams params, Identity id, ProtocolConfig cfg, Rng rng, GroupKey gk_rsu_cspa,
                    G1Point ra_public_key, G1Point bank_public_key, std::map<std::uint32_t, std::uint8_t> rates);

  const Identity& id() const { return id_; }
  const G1Point& public_key() const { return keys_.public_key; }
  bool registered() const { return key_.has_value(); }
  const IdPrivateKey& private_key() const;

  WireMessage registration_message(Millis now) const;
  Bytes registration_request(Millis now);
  void on_registration_reply(ByteView sealed_m2, Millis now);
  /// Installs K_CSPA directly (used when the RA hands the key over out of band in tests).
  void install_key(IdPrivateKey key) { key_ = std::move(key); }

  /// m5 -> m6 for the session with `peer`.
  WireMessage cspa_respond(const std::string& peer, const WireMessage& m5, Millis now);
  /// m7 (IBE ciphertext bytes) -> m8, plus m9 for the RSUs.
  TokenIssue cspa_verify_and_issue_token(const std::string& peer, ByteView m7, Millis now);

  /// Opens and applies an m17 from `rsu_id`.
  CostReport cspa_accumulate(std::uint32_t rsu_id, ByteView sealed_m17, Millis now);
  CostReport cspa_accumulate(std::uint32_t rsu_id, const WireMessage& m17, Millis now);

  /// Settles every token whose validity ended at or before `now`.
  std::vector<SettlementOrder> cspa_settle_due(Millis now);

  const CostLedger& ledger() const { return ledger_; }
  const SessionState* session(const std::string& peer) const;
  std::size_t tokens_issued() const { return tokens_issued_; }

  /// Test hook: adds `extra` to every settlement total.
  void set_billing_inflation(std::uint64_t extra) { inflation_ = extra; }

 private:
  SystemParams params_;
  Identity id_;
  ProtocolConfig cfg_;
  Rng rng_;
  GroupKey gk_rsu_cspa_;
  G1Point ra_pk_, bank_pk_;
  std::map<std::uint32_t, std::uint8_t> rates_;
  StaticKeyPair keys_;
  std::optional<IdPrivateKey> key_;
  std::map<std::string, SessionState> sessions_;
  std::map<Digest, Digest> active_token_by_pid_;  // pid -> token hash
  std::vector<Digest> token_order_;
  CostLedger ledger_;
  std::uint64_t inflation_ = 0;
  std::size_t tokens_issued_ = 0;
};

}  // namespace evc
