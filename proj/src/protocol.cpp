#include "evc/protocol.hpp"

#include "evc/errors.hpp"
#include "evc/hash.hpp"

namespace evc {

void check_fresh(const ProtocolConfig& cfg, Millis t, Millis now, std::string_view what) {
  if (!cfg.check_timestamps) return;
  if (t > now) throw Error(ErrorKind::Freshness, std::string(what) + ": timestamp in the future");
  if (now - t > cfg.freshness_window_ms) {
    throw Error(ErrorKind::Freshness, std::string(what) + ": stale timestamp (age " + std::to_string(now - t) + " ms)");
  }
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::NonceSent: return "NonceSent";
    case Phase::MacSent: return "MacSent";
    case Phase::Established: return "Established";
    case Phase::Failed: return "Failed";
  }
  return "?";
}

void SessionState::advance(Phase to) {
  bool ok = false;
  if (to == Phase::Failed) {
    ok = phase != Phase::Established && phase != Phase::Failed;
  } else {
    ok = static_cast<int>(to) == static_cast<int>(phase) + 1;
  }
  if (!ok) {
    throw Error(ErrorKind::Protocol,
                "invalid phase transition " + std::string(to_string(phase)) + " -> " + std::string(to_string(to)));
  }
  phase = to;
}

Digest session_digest(const SystemParams& params, const GtElement& k, const G1Point& k_prime, const Identity& id_cspa,
                      const Digest& pid, const Digest& n_ev, const Digest& n_cspa, std::uint8_t suffix) {
  Bytes buf;
  buf.reserve(kGtBytes + kG1Bytes + 4 * 32 + 1);
  append(buf, view(encode(k)));
  append(buf, view(encode(k_prime)));
  append(buf, view(id_cspa));
  append(buf, view(pid));
  append(buf, view(n_ev));
  append(buf, view(n_cspa));
  buf.push_back(suffix);
  return hash_to_digest(params.tags, view(buf));
}

GtElement ev_shared_key(const SystemParams& params, const Identity& id_cspa, const G2Point& k_i) {
  return pair(hash_to_identity_point(params.tags, view(id_cspa)).in_g1, k_i);
}

GtElement cspa_shared_key(const SystemParams& params, const IdPrivateKey& k_cspa, const Digest& pid) {
  return pair(k_cspa.key_g1, eow_hash(params.ra_point.in_g2, pseudonym_exponent(params, pid)));
}

Digest m_ev_prime(const SystemParams& params, const Digest& m_ev) {
  return add_mod_2_256(m_ev, to_digest(view(params.update_constant.to_bytes())));
}

GroupKey session_group_key(const Digest& sk) { return GroupKey::from_digest(kSessionKeyId, sk); }

}  // namespace evc
