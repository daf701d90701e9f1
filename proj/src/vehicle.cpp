#include "evc/vehicle.hpp"

#include "evc/errors.hpp"
#include "evc/hash.hpp"

namespace evc {

Vehicle::Vehicle(SystemParams params, Identity id, ProtocolConfig cfg, Rng rng, G1Point ra_public_key,
                 G1Point bank_public_key)
    : params_(std::move(params)),
      id_(id),
      cfg_(cfg),
      rng_(std::move(rng)),
      ra_pk_(ra_public_key),
      bank_pk_(bank_public_key) {
  keys_ = StaticKeyPair::generate(rng_);
}

WireMessage Vehicle::registration_message(Millis now) const {
  return make_message(MessageTag::M3, {{"id_ev", field(id_)}, {"t3", u64_field(now)}});
}

Bytes Vehicle::registration_request(Millis now) {
  return pke_seal(ra_pk_, view(encode(registration_message(now))), rng_);
}

void Vehicle::on_registration_reply(ByteView sealed_m4, Millis now) {
  WireMessage m4 = decode(MessageTag::M4, view(pke_open(keys_, sealed_m4)));
  check_fresh(cfg_, m4.u64("t4"), now, "m4");
  auto g1 = decode_g1(m4.get("k_ev_g1"));
  auto g2 = decode_g2(m4.get("k_ev_g2"));
  if (!g1 || !g2) throw DecodeError("k_ev", "invalid key point");
  IdPrivateKey k{Bytes(id_.begin(), id_.end()), *g1, *g2};
  if (!verify_private_key(params_, k)) throw Error(ErrorKind::Auth, "RA-issued key fails pairing verification");

  auto d = Scalar::from_bytes(m4.get("d_ev"));
  if (!d) throw DecodeError("d_ev", "not a canonical scalar");
  const Bytes& count_raw = m4.get("count");
  const std::size_t count = (std::size_t{count_raw[0]} << 8) | count_raw[1];
  const Bytes& a_list = m4.get("a_list");
  const Bytes& k_list = m4.get("k_list");

  std::vector<PseudonymRecord> batch;
  for (std::size_t i = 0; i < count; ++i) {
    PseudonymRecord r;
    auto a = Scalar::from_bytes(ByteView(a_list).subspan(i * kScalarBytes, kScalarBytes));
    auto ki = decode_g2(ByteView(k_list).subspan(i * kG2Bytes, kG2Bytes));
    if (!a) throw DecodeError("a_list", "not a canonical scalar");
    if (!ki) throw DecodeError("k_list", "invalid pseudonym key");
    r.a_i = *a;
    r.k_i = *ki;
    r.index = static_cast<std::uint32_t>(i);
    r.pid = derive_pseudonym(params_, view(id_), *d, *a);
    // k_i must match the public derivation e(P1, k_i) == e(sP1, h(H1_g2(ID_RA), H2(ID_RA || pid))).
    if (pair(params_.g1_generator, r.k_i) !=
        pair(params_.master_public_g1, eow_hash(params_.ra_point.in_g2, pseudonym_exponent(params_, r.pid)))) {
      throw Error(ErrorKind::Auth, "pseudonym key " + std::to_string(i) + " fails verification");
    }
    batch.push_back(r);
  }
  key_ = std::move(k);
  pseudonyms_ = std::move(batch);
  next_pseudonym_ = 0;
  active_pseudonym_.reset();
}

void Vehicle::forge_credentials(std::size_t count) {
  key_ = IdPrivateKey{Bytes(id_.begin(), id_.end()), Scalar::random(rng_) * params_.g1_generator,
                      Scalar::random(rng_) * params_.g2_generator};
  pseudonyms_.clear();
  for (std::size_t i = 0; i < count; ++i) {
    PseudonymRecord r;
    r.pid = rng_.digest();
    r.a_i = Scalar::random(rng_);
    r.k_i = Scalar::random(rng_) * params_.g2_generator;
    r.index = static_cast<std::uint32_t>(i);
    pseudonyms_.push_back(r);
  }
  next_pseudonym_ = 0;
  active_pseudonym_.reset();
}

const PseudonymRecord& Vehicle::current_pseudonym() const {
  if (!active_pseudonym_) throw Error(ErrorKind::Protocol, "no pseudonym selected");
  return pseudonyms_[*active_pseudonym_];
}

Bytes Vehicle::ticket_request(Millis now) {
  if (next_pseudonym_ >= pseudonyms_.size()) throw Error(ErrorKind::Protocol, "pseudonym batch exhausted");
  const Digest& pid = pseudonyms_[next_pseudonym_].pid;
  WireMessage m = make_message(MessageTag::M3Bank, {{"pid", field(pid)}, {"t3b", u64_field(now)}});
  return pke_seal(bank_pk_, view(encode(m)), rng_);
}

void Vehicle::on_ticket(ByteView sealed_m4b, Millis now) {
  WireMessage m = decode(MessageTag::M4Bank, view(pke_open(keys_, sealed_m4b)));
  check_fresh(cfg_, m.u64("t4b"), now, "m4'");
  if (next_pseudonym_ >= pseudonyms_.size()) throw Error(ErrorKind::Protocol, "ticket without a pending pseudonym");
  TicketBytes t;
  std::copy(m.get("ticket").begin(), m.get("ticket").end(), t.begin());
  tickets_[pseudonyms_[next_pseudonym_].pid] = t;
}

WireMessage Vehicle::ev_begin_auth(Millis now, bool reuse_pseudonym) {
  if (!key_) throw Error(ErrorKind::Protocol, "EV is not registered");
  if (!reuse_pseudonym || !active_pseudonym_) {
    if (next_pseudonym_ >= pseudonyms_.size()) throw Error(ErrorKind::Protocol, "pseudonym batch exhausted");
    active_pseudonym_ = next_pseudonym_++;
  }
  session_ = SessionState{};
  session_.role = Role::EV;
  session_.pid = current_pseudonym().pid;
  if (auto t = tickets_.find(session_.pid); t != tickets_.end()) session_.ticket = t->second;
  session_.n_ev = rng_.digest();
  session_.own_scalar = Scalar::random(rng_);
  session_.r_point_ev = session_.own_scalar * params_.g1_generator;
  session_.advance(Phase::NonceSent);
  token_hash_.reset();
  return make_message(MessageTag::M5, {{"n_ev", field(session_.n_ev)},
                                       {"r_ev_p", field(encode(session_.r_point_ev))},
                                       {"t5", u64_field(now)}});
}

Bytes Vehicle::ev_compute_mac(const WireMessage& m6, Millis now) {
  if (session_.phase != Phase::NonceSent) throw Error(ErrorKind::Protocol, "m6 outside a pending handshake");
  check_fresh(cfg_, m6.u64("t6"), now, "m6");
  auto r_cspa = decode_g1(m6.get("r_cspa_p"));
  if (!r_cspa || r_cspa->is_identity()) throw DecodeError("r_cspa_p", "not a valid source-group point");
  session_.n_cspa = m6.digest("n_cspa");
  session_.r_point_cspa = *r_cspa;
  session_.id_cspa = to_digest(view(m6.get("id_cspa")));
  session_.k_prime = session_.own_scalar * session_.r_point_cspa;
  session_.k_shared = ev_shared_key(params_, session_.id_cspa, current_pseudonym().k_i);
  session_.mac_ev = session_digest(params_, session_.k_shared, session_.k_prime, session_.id_cspa, session_.pid,
                                   session_.n_ev, session_.n_cspa, kMacEvSuffix);
  WireMessage m7 = make_message(MessageTag::M7, {{"id_ra", field(params_.ra_identity)},
                                                 {"pid", field(session_.pid)},
                                                 {"ticket", field(session_.ticket)},
                                                 {"mac_ev", field(session_.mac_ev)},
                                                 {"t7", u64_field(now)}});
  session_.advance(Phase::MacSent);
  return ibe_encrypt(params_, view(session_.id_cspa), view(encode(m7)), rng_).to_bytes();
}

Phase Vehicle::ev_verify_cspa(const WireMessage& m8, Millis now) {
  if (session_.phase != Phase::MacSent) throw Error(ErrorKind::Protocol, "m8 outside a pending handshake");
  try {
    check_fresh(cfg_, m8.u64("t8"), now, "m8");
  } catch (const Error&) {
    session_.advance(Phase::Failed);
    throw;
  }
  // An m8 means the CSPA issued a token and will bill it, so the session gets a meter either way.
  meters_.emplace_back();
  const Digest expect = session_digest(params_, session_.k_shared, session_.k_prime, session_.id_cspa, session_.pid,
                                       session_.n_ev, session_.n_cspa, kMacCspaSuffix);
  if (m8.digest("mac_cspa") != expect) {
    session_.advance(Phase::Failed);
    return session_.phase;
  }
  session_.mac_cspa = expect;
  Token token{xor_digest(m8.digest("masked_token"), session_.pid), m8.u64("t8"), cfg_.token_validity_ms};
  session_.token = token;
  session_.session_key = session_digest(params_, session_.k_shared, session_.k_prime, session_.id_cspa, session_.pid,
                                        session_.n_ev, session_.n_cspa, kSessionKeySuffix);
  token_hash_ = hash_to_digest(params_.tags, view(token.value));
  session_.advance(Phase::Established);
  return session_.phase;
}

Bytes Vehicle::ev_request_rsu(std::uint32_t rsu, Millis now) {
  if (session_.phase != Phase::Established) throw Error(ErrorKind::Protocol, "no established session");
  SegmentSession s;
  s.rsu = rsu;
  s.n_rsu = rng_.digest();
  segment_ = s;
  WireMessage m10 = make_message(MessageTag::M10,
                                 {{"pid", field(session_.pid)}, {"n_rsu", field(s.n_rsu)}, {"t10", u64_field(now)}});
  return seal_group(session_group_key(*session_.session_key), view(encode(m10)), rng_).to_bytes();
}

void Vehicle::on_rsu_admit(std::uint32_t rsu, std::uint32_t pads, ByteView sealed_m11, Millis now) {
  if (!segment_ || segment_->rsu != rsu) throw Error(ErrorKind::Protocol, "m11 from an RSU that was not asked");
  WireMessage m11 = decode(
      MessageTag::M11,
      view(open_group(session_group_key(*session_.session_key), GroupKeyEnvelope::from_bytes(sealed_m11))));
  check_fresh(cfg_, m11.u64("t11"), now, "m11");
  if (m11.digest("n_rsu_plus_1") != increment_mod_2_256(segment_->n_rsu)) {
    throw Error(ErrorKind::Auth, "RSU failed the nonce challenge");
  }
  segment_->rate = m11.byte("rate");
  segment_->pads = pads;
  segment_->chain = build_chain(params_, *token_hash_, m11.digest("m_ev"), pads + cfg_.chain_margin);
  meters_.back().record_rate(rsu, segment_->rate);
}

WireMessage Vehicle::next_pad_value() {
  if (!segment_ || segment_->chain.n == 0) throw Error(ErrorKind::Protocol, "no active segment");
  WireMessage m = ev_next_auth_value(params_.tags, segment_->chain, segment_->step);
  ++segment_->step;
  return m;
}

void Vehicle::on_power() {
  if (!segment_) throw Error(ErrorKind::Protocol, "no active segment");
  meters_.back().record_accept(segment_->rsu);
}

WireMessage Vehicle::terminate() {
  if (!segment_ || segment_->chain.n == 0) throw Error(ErrorKind::Protocol, "no active segment");
  segment_->terminated = true;
  return ev_terminate(params_.tags, segment_->chain);
}

BillCheck Vehicle::on_bill(ByteView sealed_m19, Millis now) {
  WireMessage m19 = decode(MessageTag::M19, view(pke_open(keys_, sealed_m19)));
  check_fresh(cfg_, m19.u64("t19"), now, "m19");
  return on_bill(m19);
}

BillCheck Vehicle::on_bill(const WireMessage& m19) {
  // A bill with no session behind it is checked against an empty meter.
  if (meters_.empty()) return ev_check_bill(ObuMeter{}, m19.u64("cost"));
  BillCheck c = ev_check_bill(meters_.front(), m19.u64("cost"));
  meters_.pop_front();
  return c;
}

const ObuMeter& Vehicle::meter() const {
  if (meters_.empty()) throw Error(ErrorKind::Lookup, "no session meter");
  return meters_.back();
}

}  // namespace evc
