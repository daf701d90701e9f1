#include "evc/ra.hpp"

#include "evc/errors.hpp"

namespace evc {

RegistrationAuthority::RegistrationAuthority(SystemParams params, Scalar master_secret, ProtocolConfig cfg, Rng rng)
    : params_(std::move(params)), master_secret_(master_secret), cfg_(cfg), rng_(std::move(rng)) {
  keys_ = StaticKeyPair::generate(rng_);
}

WireMessage RegistrationAuthority::ra_register(EntityKind kind, const WireMessage& m, Millis now) {
  if (kind == EntityKind::CSPA) {
    if (m.tag != MessageTag::M1) throw Error(ErrorKind::Protocol, "CSPA registration expects m1");
    check_fresh(cfg_, m.u64("t1"), now, "m1");
    Identity id = to_digest(view(m.get("id_cspa")));
    if (id == Identity{}) throw Error(ErrorKind::Parameter, "empty CSPA identity");
    if (!cspas_.insert(id).second) throw Error(ErrorKind::Duplicate, "CSPA already registered");
    IdPrivateKey k = extract_private_key(params_, master_secret_, view(id));
    return make_message(MessageTag::M2, {{"k_cspa_g1", field(encode(k.key_g1))},
                                         {"k_cspa_g2", field(encode(k.key_g2))},
                                         {"t2", u64_field(now)}});
  }

  if (m.tag != MessageTag::M3) throw Error(ErrorKind::Protocol, "EV registration expects m3");
  check_fresh(cfg_, m.u64("t3"), now, "m3");
  Identity id = to_digest(view(m.get("id_ev")));
  if (id == Identity{}) throw Error(ErrorKind::Parameter, "empty EV identity");
  if (registry_.find_ev(id) != nullptr) throw Error(ErrorKind::Duplicate, "EV already registered");

  IdPrivateKey k = extract_private_key(params_, master_secret_, view(id));
  Scalar d_ev = Scalar::random(rng_);
  auto batch = gen_pseudonym_batch(master_secret_, params_, view(id), d_ev, cfg_.pseudonym_batch, rng_);
  registry_.record(id, d_ev, batch);

  Bytes a_list, k_list;
  for (const auto& r : batch) {
    append(a_list, view(r.a_i.to_bytes()));
    append(k_list, view(encode(r.k_i)));
  }
  const auto count = static_cast<std::uint16_t>(batch.size());
  return make_message(MessageTag::M4, {{"k_ev_g1", field(encode(k.key_g1))},
                                       {"k_ev_g2", field(encode(k.key_g2))},
                                       {"d_ev", field(d_ev.to_bytes())},
                                       {"count", Bytes{static_cast<std::uint8_t>(count >> 8),
                                                       static_cast<std::uint8_t>(count)}},
                                       {"a_list", a_list},
                                       {"k_list", k_list},
                                       {"t4", u64_field(now)}});
}

Bytes RegistrationAuthority::handle_registration(MessageTag tag, ByteView sealed, const G1Point& reply_to,
                                                 Millis now) {
  Bytes plain = pke_open(keys_, sealed);
  EntityKind kind = tag == MessageTag::M1 ? EntityKind::CSPA : EntityKind::EV;
  WireMessage reply = ra_register(kind, decode(tag, view(plain)), now);
  return pke_seal(reply_to, view(encode(reply)), rng_);
}

}  // namespace evc
