#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evc/bytes.hpp"

namespace evc {

using TicketBytes = std::array<std::uint8_t, 64>;

/// Cost_RSU_j = l * C_j.
std::uint64_t rsu_cost(std::uint64_t pads, std::uint8_t rate);

struct LedgerEntry {
  std::uint32_t rsu_id = 0;
  std::uint64_t pads = 0;
  std::uint8_t rate = 0;
  std::uint64_t cost = 0;
};

/// CSPA-side accumulation of per-RSU costs against pseudonyms, keyed by token hash.
class CostLedger {
 public:
  struct TokenRecord {
    Digest pid{};
    TicketBytes ticket{};
    Millis expires_at = 0;
    bool settled = false;
  };

  void open_token(const Digest& token_hash, const Digest& pid, const TicketBytes& ticket, Millis expires_at);
  const TokenRecord* token(const Digest& token_hash) const;
  TokenRecord* token(const Digest& token_hash);

  /// Appends an entry for the pseudonym behind `token_hash`; returns the new total.
  std::uint64_t add(const Digest& token_hash, const LedgerEntry& entry);

  std::uint64_t total(const Digest& pid) const;
  const std::vector<LedgerEntry>& entries(const Digest& pid) const;

  /// pid_hex,rsu_id,pads,rate,cost
  std::string to_csv() const;

 private:
  std::map<Digest, TokenRecord> tokens_;
  std::map<Digest, std::vector<LedgerEntry>> entries_;
  std::vector<Digest> pid_order_;
};

/// Tamper-proof on-board meter: counts pad accepts per RSU and remembers each RSU's rate.
class ObuMeter {
 public:
  void record_rate(std::uint32_t rsu_id, std::uint8_t rate) { rates_[rsu_id] = rate; }
  void record_accept(std::uint32_t rsu_id) { ++pads_by_rsu_[rsu_id]; }

  std::uint64_t pads(std::uint32_t rsu_id) const;
  const std::map<std::uint32_t, std::uint64_t>& pads_by_rsu() const { return pads_by_rsu_; }
  const std::map<std::uint32_t, std::uint8_t>& rates() const { return rates_; }
  std::uint64_t expected_total() const;
  bool tamper_proof() const { return true; }

 private:
  std::map<std::uint32_t, std::uint64_t> pads_by_rsu_;
  std::map<std::uint32_t, std::uint8_t> rates_;
};

struct BillCheck {
  bool accepted = true;
  std::int64_t delta = 0;  // billed - metered
  std::uint64_t billed = 0;
  std::uint64_t metered = 0;
};

BillCheck ev_check_bill(const ObuMeter& meter, std::uint64_t billed_total);

}  // namespace evc
