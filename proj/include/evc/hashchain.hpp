#pragma once

// Per-pad authentication with a one-way hash chain, and the termination handshake.
//
// base = h(T) || h(M_EV), head = h^n(base). The EV reveals h^(n-1-i)(base) at pad i;
// each pad checks one hash step against its current expectation, then relays the
// accepted value to the next pad so that old values can never be reused downstream.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evc/bytes.hpp"
#include "evc/params.hpp"
#include "evc/protocol.hpp"
#include "evc/rng.hpp"
#include "evc/wire.hpp"

namespace evc {

struct ChainState {
  Bytes base;                  // h(T) || h(M_EV), 64 bytes
  Digest head{};               // h^n(base)
  std::size_t n = 0;
  std::size_t next_index = 0;  // next pad step the EV will answer
  Digest anchor{};             // y^ = h^2(h(T) xor h(M'_EV))
  Digest token_hash{};
  Digest m_ev_hash{};
  Digest m_ev_prime_hash{};
};

/// h^count(base) for the 64-byte base; count == 0 is not a digest and is rejected.
Digest chain_iterate(const HashTags& tags, ByteView base, std::size_t count);

ChainState build_chain(const SystemParams& params, const Digest& token_hash, const Digest& m_ev, std::size_t n);

/// m13 {1, h^(n-1-i)(base)} for pad step i; ChainExhausted when i >= n - 1.
WireMessage ev_next_auth_value(const HashTags& tags, const ChainState& chain, std::size_t step);

/// m15 {0, h(h(T) xor h(M'_EV)), y^}.
WireMessage ev_terminate(const HashTags& tags, const ChainState& chain);

constexpr std::uint8_t kContinueFlag = 1;
constexpr std::uint8_t kStopFlag = 0;

struct PadVerdict {
  bool accepted = false;
  Digest chain_head{};            // identifies the chain (and RSU session) on accept
  std::optional<Bytes> relay;     // sealed m14 for the next pad, if any
  std::string reason;
};

struct TerminationVerdict {
  bool accepted = false;
  Digest anchor{};
  std::optional<Bytes> m16;       // sealed under GK_RSUj-CP
  std::string reason;
};

/// A charging pad. Holds one expectation per active chain in its segment.
class ChargingPad {
 public:
  ChargingPad(const SystemParams& params, std::uint32_t rsu, std::uint32_t index, std::uint32_t pads_in_segment,
              ProtocolConfig cfg, Rng rng, GroupKey gk_rsu_cp, GroupKey gk_cp);

  std::uint32_t rsu() const { return rsu_; }
  std::uint32_t index() const { return index_; }

  void on_chain_broadcast(ByteView sealed_m12, Millis now);
  PadVerdict cp_verify_and_relay(const WireMessage& m13);
  /// Returns false if the relayed value matches no active chain.
  bool on_relay(ByteView sealed_m14);
  TerminationVerdict cp_verify_termination(const WireMessage& m15, Millis now);
  void on_close(ByteView sealed_close, Millis now);

  std::size_t active_chains() const;
  /// Current expectation for a chain, identified by its head.
  std::optional<Digest> expectation(const Digest& head) const;

 private:
  struct Record {
    Digest head{};
    Digest anchor{};
    Digest expected{};
    std::size_t accepts = 0;
    bool active = true;
  };

  SystemParams params_;
  std::uint32_t rsu_, index_, pads_;
  ProtocolConfig cfg_;
  Rng rng_;
  GroupKey gk_rsu_cp_, gk_cp_;
  std::vector<Record> records_;
};

/// Per-session audit row: {token_hash_hex, n, accepts, rejects, terminated}.
struct ChainAudit {
  Digest token_hash{};
  std::size_t n = 0;
  std::uint64_t accepts = 0;
  std::uint64_t rejects = 0;
  bool terminated = false;

  std::string to_json() const;
};

}  // namespace evc
