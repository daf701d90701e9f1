#include "evc/hashchain.hpp"

#include <json.hpp>

#include "evc/errors.hpp"
#include "evc/hash.hpp"
#include "evc/rng.hpp"

namespace evc {

Digest chain_iterate(const HashTags& tags, ByteView base, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::Parameter, "chain_iterate: count must be >= 1");
  return iterate_digest(tags, hash_to_digest(tags, base), count - 1);
}

ChainState build_chain(const SystemParams& params, const Digest& token_hash, const Digest& m_ev, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::Parameter, "chain length must be >= 2");
  const HashTags& tags = params.tags;
  ChainState c;
  c.n = n;
  c.token_hash = token_hash;
  c.m_ev_hash = hash_to_digest(tags, view(m_ev));
  c.m_ev_prime_hash = hash_to_digest(tags, view(m_ev_prime(params, m_ev)));
  c.base = concat({view(token_hash), view(c.m_ev_hash)});
  c.head = chain_iterate(tags, view(c.base), n);
  c.anchor = iterate_digest(tags, xor_digest(token_hash, c.m_ev_prime_hash), 2);
  return c;
}

WireMessage ev_next_auth_value(const HashTags& tags, const ChainState& chain, std::size_t step) {
  if (step + 1 >= chain.n) {
    throw Error(ErrorKind::ChainExhausted, "hash chain of length " + std::to_string(chain.n) + " has no value for step " +
                                               std::to_string(step));
  }
  Digest v = chain_iterate(tags, view(chain.base), chain.n - 1 - step);
  return make_message(MessageTag::M13, {{"flag", u8_field(kContinueFlag)}, {"value", field(v)}});
}

WireMessage ev_terminate(const HashTags& tags, const ChainState& chain) {
  Digest pre = hash_to_digest(tags, view(xor_digest(chain.token_hash, chain.m_ev_prime_hash)));
  return make_message(MessageTag::M15,
                      {{"flag", u8_field(kStopFlag)}, {"preimage", field(pre)}, {"anchor", field(chain.anchor)}});
}

ChargingPad::ChargingPad(const SystemParams& params, std::uint32_t rsu, std::uint32_t index,
                         std::uint32_t pads_in_segment, ProtocolConfig cfg, Rng rng, GroupKey gk_rsu_cp,
                         GroupKey gk_cp)
    : params_(params),
      rsu_(rsu),
      index_(index),
      pads_(pads_in_segment),
      cfg_(cfg),
      rng_(std::move(rng)),
      gk_rsu_cp_(gk_rsu_cp),
      gk_cp_(gk_cp) {}

void ChargingPad::on_chain_broadcast(ByteView sealed_m12, Millis now) {
  WireMessage m12 = decode(MessageTag::M12, view(open_group(gk_rsu_cp_, GroupKeyEnvelope::from_bytes(sealed_m12))));
  check_fresh(cfg_, m12.u64("t12"), now, "m12");
  Record r;
  r.head = m12.digest("chain_head");
  r.anchor = m12.digest("anchor");
  r.expected = r.head;
  records_.push_back(r);
}

PadVerdict ChargingPad::cp_verify_and_relay(const WireMessage& m13) {
  PadVerdict v;
  if (m13.tag != MessageTag::M13 || m13.byte("flag") != kContinueFlag) {
    v.reason = "not a continue message";
    return v;
  }
  const Digest value = m13.digest("value");
  const Digest stepped = hash_to_digest(params_.tags, view(value));
  for (auto& r : records_) {
    if (!r.active || stepped != r.expected) continue;
    r.expected = value;
    ++r.accepts;
    v.accepted = true;
    v.chain_head = r.head;
    if (index_ + 1 < pads_) {
      WireMessage m14 = make_message(MessageTag::M14, {{"value", field(value)}});
      v.relay = seal_group(gk_cp_, view(encode(m14)), rng_).to_bytes();
    }
    return v;
  }
  v.reason = "value does not extend any active chain";
  return v;
}

bool ChargingPad::on_relay(ByteView sealed_m14) {
  WireMessage m14 = decode(MessageTag::M14, view(open_group(gk_cp_, GroupKeyEnvelope::from_bytes(sealed_m14))));
  const Digest value = m14.digest("value");
  for (auto& r : records_) {
    if (!r.active) continue;
    // The relayed value sits some steps below our current expectation.
    Digest probe = value;
    for (std::size_t k = 0; k <= pads_ + cfg_.chain_margin; ++k) {
      if (probe == r.expected) {
        r.expected = value;
        return true;
      }
      probe = hash_to_digest(params_.tags, view(probe));
    }
  }
  return false;
}

TerminationVerdict ChargingPad::cp_verify_termination(const WireMessage& m15, Millis now) {
  TerminationVerdict v;
  if (m15.tag != MessageTag::M15 || m15.byte("flag") != kStopFlag) {
    v.reason = "not a stop message";
    return v;
  }
  v.anchor = m15.digest("anchor");
  Record* rec = nullptr;
  for (auto& r : records_) {
    if (r.active && r.anchor == v.anchor) rec = &r;
  }
  if (rec == nullptr) throw Error(ErrorKind::Protocol, "termination for an unknown anchor");
  if (hash_to_digest(params_.tags, view(m15.digest("preimage"))) != rec->anchor) {
    v.reason = "termination preimage does not hash to the anchor";
    return v;
  }
  v.accepted = true;
  WireMessage m16 = make_message(MessageTag::M16, {{"anchor", field(rec->anchor)}, {"t16", u64_field(now)}});
  v.m16 = seal_group(gk_rsu_cp_, view(encode(m16)), rng_).to_bytes();
  return v;
}

void ChargingPad::on_close(ByteView sealed_close, Millis now) {
  WireMessage c =
      decode(MessageTag::SegmentClose, view(open_group(gk_rsu_cp_, GroupKeyEnvelope::from_bytes(sealed_close))));
  check_fresh(cfg_, c.u64("t_close"), now, "close");
  const Digest anchor = c.digest("anchor");
  for (auto& r : records_) {
    if (r.anchor == anchor) r.active = false;
  }
}

std::size_t ChargingPad::active_chains() const {
  std::size_t n = 0;
  for (const auto& r : records_) n += r.active ? 1 : 0;
  return n;
}

std::optional<Digest> ChargingPad::expectation(const Digest& head) const {
  for (const auto& r : records_) {
    if (r.head == head) return r.expected;
  }
  return std::nullopt;
}

std::string ChainAudit::to_json() const {
  nlohmann::json j = {{"token_hash_hex", to_hex(token_hash)},
                      {"n", n},
                      {"accepts", accepts},
                      {"rejects", rejects},
                      {"terminated", terminated}};
  return j.dump();
}

}  // namespace evc
