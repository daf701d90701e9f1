#pragma once

#include <map>

#include "evc/ibe.hpp"
#include "evc/pke.hpp"
#include "evc/protocol.hpp"
#include "evc/rng.hpp"
#include "evc/wire.hpp"

namespace evc {

struct BankBill {
  WireMessage m19;
  Identity ev_id{};
  Digest pid{};
  std::uint64_t cost = 0;
  Bytes sealed_m19;  // sealed to the EV's account key
};

/// Issues tickets bound to pseudonyms and settles CSPA bills against them.
class Bank {
 public:
  /// The Bank resolves pseudonyms through the RA's registry.
  Bank(SystemParams params, const RaRegistry* registry, ProtocolConfig cfg, Rng rng);

  const G1Point& public_key() const { return keys_.public_key; }
  void open_account(const Identity& ev_id, const G1Point& ev_public_key);

  Ticket bank_issue_ticket(const Digest& pid);
  std::optional<Digest> resolve_ticket(const TicketBytes& ticket) const;

  /// m3' -> m4'; the reply is sealed to the pseudonym owner's account key.
  Bytes handle_ticket_request(ByteView sealed_m3b, Millis now);

  /// m18 -> m19. Rejects unknown and already-settled tickets with SettlementError.
  BankBill bank_bill(const WireMessage& m18, Millis now);
  BankBill handle_settlement(ByteView sealed_m18, Millis now);

  std::size_t settled_count() const { return settled_.size(); }

 private:
  SystemParams params_;
  const RaRegistry* registry_;
  ProtocolConfig cfg_;
  Rng rng_;
  StaticKeyPair keys_;
  std::map<TicketBytes, Digest> tickets_;
  std::map<TicketBytes, std::uint64_t> settled_;
  std::map<Identity, G1Point> accounts_;
};

}  // namespace evc
