#include "evc/cspa.hpp"

#include "evc/errors.hpp"
#include "evc/hash.hpp"

namespace evc {

ChargingAuthority::ChargingAuthority(SystemParams params, Identity id, ProtocolConfig cfg, Rng rng,
                                     GroupKey gk_rsu_cspa, G1Point ra_public_key, G1Point bank_public_key,
                                     std::map<std::uint32_t, std::uint8_t> rates)
    : params_(std::move(params)),
      id_(id),
      cfg_(cfg),
      rng_(std::move(rng)),
      gk_rsu_cspa_(gk_rsu_cspa),
      ra_pk_(ra_public_key),
      bank_pk_(bank_public_key),
      rates_(std::move(rates)) {
  keys_ = StaticKeyPair::generate(rng_);
}

const IdPrivateKey& ChargingAuthority::private_key() const {
  if (!key_) throw Error(ErrorKind::Protocol, "CSPA is not registered");
  return *key_;
}

WireMessage ChargingAuthority::registration_message(Millis now) const {
  return make_message(MessageTag::M1, {{"id_cspa", field(id_)}, {"t1", u64_field(now)}});
}

Bytes ChargingAuthority::registration_request(Millis now) {
  return pke_seal(ra_pk_, view(encode(registration_message(now))), rng_);
}

void ChargingAuthority::on_registration_reply(ByteView sealed_m2, Millis now) {
  WireMessage m2 = decode(MessageTag::M2, view(pke_open(keys_, sealed_m2)));
  check_fresh(cfg_, m2.u64("t2"), now, "m2");
  auto g1 = decode_g1(m2.get("k_cspa_g1"));
  auto g2 = decode_g2(m2.get("k_cspa_g2"));
  if (!g1 || !g2) throw DecodeError("k_cspa", "invalid key point");
  IdPrivateKey k{Bytes(id_.begin(), id_.end()), *g1, *g2};
  if (!verify_private_key(params_, k)) throw Error(ErrorKind::Auth, "RA-issued key fails pairing verification");
  key_ = std::move(k);
}

WireMessage ChargingAuthority::cspa_respond(const std::string& peer, const WireMessage& m5, Millis now) {
  if (!key_) throw Error(ErrorKind::Protocol, "CSPA is not registered");
  check_fresh(cfg_, m5.u64("t5"), now, "m5");
  auto r_ev = decode_g1(m5.get("r_ev_p"));
  if (!r_ev) throw DecodeError("r_ev_p", "not a valid source-group point");
  if (r_ev->is_identity()) throw Error(ErrorKind::Auth, "r_EV * P is the identity");

  SessionState s;
  s.role = Role::CSPA;
  s.n_ev = m5.digest("n_ev");
  s.r_point_ev = *r_ev;
  s.own_scalar = Scalar::random(rng_);
  s.r_point_cspa = s.own_scalar * params_.g1_generator;
  s.n_cspa = rng_.digest();
  s.id_cspa = id_;
  s.k_prime = s.own_scalar * s.r_point_ev;
  s.advance(Phase::NonceSent);
  sessions_[peer] = s;

  return make_message(MessageTag::M6, {{"n_cspa", field(s.n_cspa)},
                                       {"r_cspa_p", field(encode(s.r_point_cspa))},
                                       {"id_cspa", field(id_)},
                                       {"t6", u64_field(now)}});
}

TokenIssue ChargingAuthority::cspa_verify_and_issue_token(const std::string& peer, ByteView m7_bytes, Millis now) {
  auto it = sessions_.find(peer);
  SessionState* s = it == sessions_.end() ? nullptr : &it->second;
  auto fail = [&](ErrorKind kind, const std::string& why) -> Error {
    if (s != nullptr && s->phase != Phase::Established && s->phase != Phase::Failed) s->advance(Phase::Failed);
    return Error(kind, why);
  };

  Bytes plain = ibe_decrypt(params_, private_key(), IbeCiphertext::from_bytes(m7_bytes));
  WireMessage m7;
  try {
    m7 = decode(MessageTag::M7, view(plain));
  } catch (const DecodeError&) {
    throw fail(ErrorKind::Auth, "m7 does not decrypt to a well-formed message");
  }
  check_fresh(cfg_, m7.u64("t7"), now, "m7");
  if (to_digest(view(m7.get("id_ra"))) != params_.ra_identity) throw fail(ErrorKind::Auth, "m7 names a foreign RA");

  const Digest pid = m7.digest("pid");
  if (auto active = active_token_by_pid_.find(pid); active != active_token_by_pid_.end()) {
    const auto* rec = ledger_.token(active->second);
    if (rec != nullptr && now < rec->expires_at) {
      throw fail(ErrorKind::DoubleSpend, "pseudonym already holds an active token");
    }
  }
  if (s == nullptr || s->phase != Phase::NonceSent) {
    throw Error(ErrorKind::Protocol, "m7 without a pending handshake from " + peer);
  }

  s->pid = pid;
  std::copy(m7.get("ticket").begin(), m7.get("ticket").end(), s->ticket.begin());
  s->mac_ev = m7.digest("mac_ev");
  s->k_shared = cspa_shared_key(params_, *key_, pid);
  const Digest expect =
      session_digest(params_, s->k_shared, s->k_prime, id_, pid, s->n_ev, s->n_cspa, kMacEvSuffix);
  if (expect != s->mac_ev) throw fail(ErrorKind::Auth, "mac_EV mismatch");
  s->advance(Phase::MacSent);

  Token token{rng_.digest(), now, cfg_.token_validity_ms};
  s->token = token;
  s->mac_cspa = session_digest(params_, s->k_shared, s->k_prime, id_, pid, s->n_ev, s->n_cspa, kMacCspaSuffix);
  s->session_key = session_digest(params_, s->k_shared, s->k_prime, id_, pid, s->n_ev, s->n_cspa, kSessionKeySuffix);
  s->advance(Phase::Established);

  TokenIssue out;
  out.pid = pid;
  out.token = token;
  out.token_hash = hash_to_digest(params_.tags, view(token.value));
  out.m8 = make_message(MessageTag::M8, {{"mac_cspa", field(s->mac_cspa)},
                                         {"masked_token", field(xor_digest(token.value, pid))},
                                         {"t8", u64_field(now)}});
  out.m9 = make_message(MessageTag::M9, {{"token_hash", field(out.token_hash)},
                                         {"pid", field(pid)},
                                         {"sk", field(*s->session_key)},
                                         {"t9", u64_field(now)}});
  out.sealed_m9 = seal_group(gk_rsu_cspa_, view(encode(out.m9)), rng_).to_bytes();

  ledger_.open_token(out.token_hash, pid, s->ticket, token.expires_at());
  active_token_by_pid_[pid] = out.token_hash;
  token_order_.push_back(out.token_hash);
  ++tokens_issued_;
  return out;
}

CostReport ChargingAuthority::cspa_accumulate(std::uint32_t rsu_id, ByteView sealed_m17, Millis now) {
  return cspa_accumulate(
      rsu_id, decode(MessageTag::M17, view(open_group(gk_rsu_cspa_, GroupKeyEnvelope::from_bytes(sealed_m17)))), now);
}

CostReport ChargingAuthority::cspa_accumulate(std::uint32_t rsu_id, const WireMessage& m17, Millis now) {
  check_fresh(cfg_, m17.u64("t17"), now, "m17");
  CostReport r;
  r.rsu_id = rsu_id;
  r.token_hash = m17.digest("token_hash");
  r.cost = m17.u64("cost");
  auto* rec = ledger_.token(r.token_hash);
  if (rec == nullptr) throw Error(ErrorKind::Lookup, "cost report for an unknown token");
  if (rec->settled || now >= rec->expires_at) {
    throw Error(ErrorKind::DoubleSpend, "cost report after token expiry");
  }
  r.pid = rec->pid;
  LedgerEntry e;
  e.rsu_id = rsu_id;
  e.cost = r.cost;
  auto rate = rates_.find(rsu_id);
  e.rate = rate == rates_.end() ? 0 : rate->second;
  e.pads = e.rate == 0 ? 0 : r.cost / e.rate;
  r.total = ledger_.add(r.token_hash, e);
  return r;
}

std::vector<SettlementOrder> ChargingAuthority::cspa_settle_due(Millis now) {
  std::vector<SettlementOrder> out;
  for (const Digest& th : token_order_) {
    auto* rec = ledger_.token(th);
    if (rec == nullptr || rec->settled || now < rec->expires_at) continue;
    rec->settled = true;
    if (auto a = active_token_by_pid_.find(rec->pid); a != active_token_by_pid_.end() && a->second == th) {
      active_token_by_pid_.erase(a);
    }
    SettlementOrder o;
    o.pid = rec->pid;
    o.token_hash = th;
    o.ticket = rec->ticket;
    o.total = ledger_.total(rec->pid) + inflation_;
    o.m18 = make_message(MessageTag::M18,
                         {{"ticket", field(o.ticket)}, {"cost", u64_field(o.total)}, {"t18", u64_field(now)}});
    o.sealed_m18 = pke_seal(bank_pk_, view(encode(o.m18)), rng_);
    out.push_back(std::move(o));
  }
  return out;
}

const SessionState* ChargingAuthority::session(const std::string& peer) const {
  auto it = sessions_.find(peer);
  return it == sessions_.end() ? nullptr : &it->second;
}

}  // namespace evc
