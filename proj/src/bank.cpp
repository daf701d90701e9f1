#include "evc/bank.hpp"

#include "evc/errors.hpp"

namespace evc {

Bank::Bank(SystemParams params, const RaRegistry* registry, ProtocolConfig cfg, Rng rng)
    : params_(std::move(params)), registry_(registry), cfg_(cfg), rng_(std::move(rng)) {
  keys_ = StaticKeyPair::generate(rng_);
}

void Bank::open_account(const Identity& ev_id, const G1Point& ev_public_key) { accounts_[ev_id] = ev_public_key; }

Ticket Bank::bank_issue_ticket(const Digest& pid) {
  if (registry_ == nullptr || !registry_->lookup(pid)) {
    throw Error(ErrorKind::UnknownPseudonym, "bank cannot resolve pseudonym " + to_hex(pid).substr(0, 16));
  }
  Ticket t;
  t.pid = pid;
  do {
    rng_.fill(t.value);
  } while (tickets_.count(t.value));
  tickets_[t.value] = pid;
  return t;
}

std::optional<Digest> Bank::resolve_ticket(const TicketBytes& ticket) const {
  auto it = tickets_.find(ticket);
  if (it == tickets_.end()) return std::nullopt;
  return it->second;
}

Bytes Bank::handle_ticket_request(ByteView sealed_m3b, Millis now) {
  WireMessage m = decode(MessageTag::M3Bank, view(pke_open(keys_, sealed_m3b)));
  check_fresh(cfg_, m.u64("t3b"), now, "m3'");
  Digest pid = m.digest("pid");
  Ticket t = bank_issue_ticket(pid);
  auto owner = registry_->lookup(pid);
  auto acct = accounts_.find(owner->ev_id);
  if (acct == accounts_.end()) throw Error(ErrorKind::UnknownPseudonym, "no account for pseudonym owner");
  WireMessage reply = make_message(MessageTag::M4Bank, {{"ticket", field(t.value)}, {"t4b", u64_field(now)}});
  return pke_seal(acct->second, view(encode(reply)), rng_);
}

BankBill Bank::bank_bill(const WireMessage& m18, Millis now) {
  check_fresh(cfg_, m18.u64("t18"), now, "m18");
  TicketBytes ticket;
  const Bytes& raw = m18.get("ticket");
  std::copy(raw.begin(), raw.end(), ticket.begin());
  auto pid = resolve_ticket(ticket);
  if (!pid) throw Error(ErrorKind::Settlement, "unknown ticket");
  if (settled_.count(ticket)) throw Error(ErrorKind::Settlement, "ticket already settled");
  auto owner = registry_->lookup(*pid);
  if (!owner) throw Error(ErrorKind::Settlement, "ticket pseudonym has no owner");
  BankBill bill;
  bill.pid = *pid;
  bill.ev_id = owner->ev_id;
  bill.cost = m18.u64("cost");
  bill.m19 = make_message(MessageTag::M19, {{"cost", u64_field(bill.cost)}, {"t19", u64_field(now)}});
  settled_[ticket] = bill.cost;
  auto acct = accounts_.find(bill.ev_id);
  if (acct != accounts_.end()) bill.sealed_m19 = pke_seal(acct->second, view(encode(bill.m19)), rng_);
  return bill;
}

BankBill Bank::handle_settlement(ByteView sealed_m18, Millis now) {
  return bank_bill(decode(MessageTag::M18, view(pke_open(keys_, sealed_m18))), now);
}

}  // namespace evc
