#include "evc/billing.hpp"

#include "evc/errors.hpp"

namespace evc {

std::uint64_t rsu_cost(std::uint64_t pads, std::uint8_t rate) { return pads * rate; }

void CostLedger::open_token(const Digest& token_hash, const Digest& pid, const TicketBytes& ticket,
                            Millis expires_at) {
  if (!tokens_.emplace(token_hash, TokenRecord{pid, ticket, expires_at, false}).second) {
    throw Error(ErrorKind::Duplicate, "token already in ledger");
  }
  if (!entries_.count(pid)) {
    entries_[pid];
    pid_order_.push_back(pid);
  }
}

const CostLedger::TokenRecord* CostLedger::token(const Digest& token_hash) const {
  auto it = tokens_.find(token_hash);
  return it == tokens_.end() ? nullptr : &it->second;
}

CostLedger::TokenRecord* CostLedger::token(const Digest& token_hash) {
  auto it = tokens_.find(token_hash);
  return it == tokens_.end() ? nullptr : &it->second;
}

std::uint64_t CostLedger::add(const Digest& token_hash, const LedgerEntry& entry) {
  const TokenRecord* rec = token(token_hash);
  if (rec == nullptr) throw Error(ErrorKind::Lookup, "cost report for unknown token");
  entries_[rec->pid].push_back(entry);
  return total(rec->pid);
}

std::uint64_t CostLedger::total(const Digest& pid) const {
  std::uint64_t sum = 0;
  auto it = entries_.find(pid);
  if (it == entries_.end()) return 0;
  for (const auto& e : it->second) sum += e.cost;
  return sum;
}

const std::vector<LedgerEntry>& CostLedger::entries(const Digest& pid) const {
  static const std::vector<LedgerEntry> empty;
  auto it = entries_.find(pid);
  return it == entries_.end() ? empty : it->second;
}

std::string CostLedger::to_csv() const {
  std::string out = "pid_hex,rsu_id,pads,rate,cost\n";
  for (const Digest& pid : pid_order_) {
    for (const auto& e : entries_.at(pid)) {
      out += to_hex(pid) + "," + std::to_string(e.rsu_id) + "," + std::to_string(e.pads) + "," +
             std::to_string(e.rate) + "," + std::to_string(e.cost) + "\n";
    }
  }
  return out;
}

std::uint64_t ObuMeter::pads(std::uint32_t rsu_id) const {
  auto it = pads_by_rsu_.find(rsu_id);
  return it == pads_by_rsu_.end() ? 0 : it->second;
}

std::uint64_t ObuMeter::expected_total() const {
  std::uint64_t sum = 0;
  for (const auto& [rsu, n] : pads_by_rsu_) {
    auto r = rates_.find(rsu);
    sum += rsu_cost(n, r == rates_.end() ? 0 : r->second);
  }
  return sum;
}

BillCheck ev_check_bill(const ObuMeter& meter, std::uint64_t billed_total) {
  BillCheck c;
  c.billed = billed_total;
  c.metered = meter.expected_total();
  c.delta = static_cast<std::int64_t>(billed_total) - static_cast<std::int64_t>(c.metered);
  c.accepted = c.delta == 0;
  return c;
}

}  // namespace evc
