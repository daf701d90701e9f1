#include "evc/rsu.hpp"

#include "evc/errors.hpp"
#include "evc/hash.hpp"

namespace evc {

RoadsideUnit::RoadsideUnit(SystemParams params, std::uint32_t index, std::uint8_t rate, std::uint32_t pads,
                           ProtocolConfig cfg, Rng rng, GroupKey gk_rsu_cspa, GroupKey gk_rsu_cp)
    : params_(std::move(params)),
      index_(index),
      rate_(rate),
      pads_(pads),
      cfg_(cfg),
      rng_(std::move(rng)),
      gk_rsu_cspa_(gk_rsu_cspa),
      gk_rsu_cp_(gk_rsu_cp) {
  if (rate == 0) throw Error(ErrorKind::Parameter, "RSU rate must be positive");
  if (pads == 0) throw Error(ErrorKind::Parameter, "segment needs at least one pad");
}

void RoadsideUnit::on_token_distribution(ByteView sealed_m9, Millis now) {
  on_token_distribution(
      decode(MessageTag::M9, view(open_group(gk_rsu_cspa_, GroupKeyEnvelope::from_bytes(sealed_m9)))), now);
}

void RoadsideUnit::on_token_distribution(const WireMessage& m9, Millis now) {
  check_fresh(cfg_, m9.u64("t9"), now, "m9");
  TokenInfo info{m9.digest("pid"), m9.digest("sk"), m9.u64("t9") + cfg_.token_validity_ms};
  tokens_[m9.digest("token_hash")] = info;
}

Admission RoadsideUnit::rsu_admit(ByteView sealed_m10, Millis now) {
  const GroupKeyEnvelope env = GroupKeyEnvelope::from_bytes(sealed_m10);
  // The EV is anonymous until the envelope opens, so try every session key we hold.
  for (const auto& [th, info] : tokens_) {
    if (now >= info.expires_at) continue;
    const GroupKey key = session_group_key(info.sk);
    Bytes plain;
    try {
      plain = open_group(key, env);
    } catch (const Error&) {
      continue;
    }
    WireMessage m10 = decode(MessageTag::M10, view(plain));
    check_fresh(cfg_, m10.u64("t10"), now, "m10");
    if (m10.digest("pid") != info.pid) throw Error(ErrorKind::Admission, "m10 pseudonym does not match its token");

    Admission a;
    a.pid = info.pid;
    a.token_hash = th;
    const Digest m_ev = rng_.digest();
    WireMessage m11 = make_message(MessageTag::M11, {{"n_rsu_plus_1", field(increment_mod_2_256(m10.digest("n_rsu")))},
                                                     {"m_ev", field(m_ev)},
                                                     {"t11", u64_field(now)},
                                                     {"rate", u8_field(rate_)}});
    a.sealed_m11 = seal_group(key, view(encode(m11)), rng_).to_bytes();

    const ChainState chain = build_chain(params_, th, m_ev, pads_ + cfg_.chain_margin);
    a.m12 = make_message(MessageTag::M12,
                         {{"chain_head", field(chain.head)}, {"anchor", field(chain.anchor)}, {"t12", u64_field(now)}});
    a.sealed_m12 = seal_group(gk_rsu_cp_, view(encode(a.m12)), rng_).to_bytes();
    charging_.push_back({th, chain.head, chain.anchor, 0, false});
    return a;
  }
  throw Error(ErrorKind::Admission, "no valid token opens this request");
}

void RoadsideUnit::on_pad_accept(const Digest& chain_head) {
  for (auto& c : charging_) {
    if (!c.closed && c.head == chain_head) {
      ++c.pads;
      return;
    }
  }
}

SegmentReport RoadsideUnit::on_termination(ByteView sealed_m16, Millis now) {
  WireMessage m16 = decode(MessageTag::M16, view(open_group(gk_rsu_cp_, GroupKeyEnvelope::from_bytes(sealed_m16))));
  check_fresh(cfg_, m16.u64("t16"), now, "m16");
  const Digest anchor = m16.digest("anchor");
  for (auto& c : charging_) {
    if (c.closed || c.anchor != anchor) continue;
    c.closed = true;
    SegmentReport r;
    r.token_hash = c.token_hash;
    r.pads = c.pads;
    r.cost = rsu_cost(c.pads, rate_);
    WireMessage m17 = make_message(MessageTag::M17, {{"token_hash", field(c.token_hash)},
                                                     {"cost", u64_field(r.cost)},
                                                     {"t17", u64_field(now)}});
    r.sealed_m17 = seal_group(gk_rsu_cspa_, view(encode(m17)), rng_).to_bytes();
    WireMessage close =
        make_message(MessageTag::SegmentClose, {{"anchor", field(anchor)}, {"t_close", u64_field(now)}});
    r.sealed_close = seal_group(gk_rsu_cp_, view(encode(close)), rng_).to_bytes();
    return r;
  }
  throw Error(ErrorKind::Lookup, "termination for an unknown or closed session");
}

std::uint64_t RoadsideUnit::rsu_report_cost(const Digest& anchor) const {
  for (const auto& c : charging_) {
    if (c.anchor == anchor) return rsu_cost(c.pads, rate_);
  }
  throw Error(ErrorKind::Lookup, "no charging session with this anchor");
}

}  // namespace evc
