#pragma once

#include <map>
#include <optional>
#include <vector>

#include "evc/billing.hpp"
#include "evc/hashchain.hpp"
#include "evc/protocol.hpp"
#include "evc/rng.hpp"
#include "evc/wire.hpp"

namespace evc {

struct Admission {
  Digest pid{};
  Digest token_hash{};
  Bytes sealed_m11;   // under the session key
  WireMessage m12;
  Bytes sealed_m12;   // under GK_RSUj-CP
};

struct SegmentReport {
  Digest token_hash{};
  std::uint64_t pads = 0;
  std::uint64_t cost = 0;
  Bytes sealed_m17;    // under GK_RSU-CSPA
  Bytes sealed_close;  // under GK_RSUj-CP
};

/// Roadside unit: admits authenticated EVs onto its segment and reports their cost.
class RoadsideUnit {
 public:
  RoadsideUnit(SystemParams params, std::uint32_t index, std::uint8_t rate, std::uint32_t pads, ProtocolConfig cfg,
               Rng rng, GroupKey gk_rsu_cspa, GroupKey gk_rsu_cp);

  std::uint32_t index() const { return index_; }
  std::uint8_t rate() const { return rate_; }
  std::uint32_t pads() const { return pads_; }

  /// Records an m9 fanned out by the CSPA.
  void on_token_distribution(ByteView sealed_m9, Millis now);
  void on_token_distribution(const WireMessage& m9, Millis now);

  /// m10 -> m11 for the EV and m12 for the pads. Throws Admission when no token matches.
  Admission rsu_admit(ByteView sealed_m10, Millis now);

  /// CP -> RSU notification that a pad accepted a value of the chain with this head.
  void on_pad_accept(const Digest& chain_head);

  /// m16 from a pad -> m17 for the CSPA, plus the close notice for the pads.
  SegmentReport on_termination(ByteView sealed_m16, Millis now);

  /// Cost accrued so far for the session with this anchor.
  std::uint64_t rsu_report_cost(const Digest& anchor) const;
  std::size_t known_tokens() const { return tokens_.size(); }

 private:
  struct TokenInfo {
    Digest pid{};
    Digest sk{};
    Millis expires_at = 0;
  };
  struct Charging {
    Digest token_hash{};
    Digest head{};
    Digest anchor{};
    std::uint64_t pads = 0;
    bool closed = false;
  };

  SystemParams params_;
  std::uint32_t index_;
  std::uint8_t rate_;
  std::uint32_t pads_;
  ProtocolConfig cfg_;
  Rng rng_;
  GroupKey gk_rsu_cspa_, gk_rsu_cp_;
  std::map<Digest, TokenInfo> tokens_;  // by token hash
  std::vector<Charging> charging_;
};

}  // namespace evc
