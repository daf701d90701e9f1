#include "evc/ibe.hpp"

#include <json.hpp>

#include "evc/errors.hpp"
#include "evc/hash.hpp"
#include "evc/rng.hpp"

namespace evc {

namespace {

Bytes mask_stream(const SystemParams& params, const GtElement& g, std::size_t length) {
  const auto ser = encode(g);
  Bytes out;
  out.reserve(length + kDigestSize);
  for (std::uint32_t ctr = 0; out.size() < length; ++ctr) {
    Bytes block(ser.begin(), ser.end());
    append(block, as_bytes("ibe-mask"));
    put_u64(block, ctr);
    Digest d = hash_to_digest(params.tags, view(block));
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(length);
  return out;
}

Bytes xor_bytes(ByteView a, const Bytes& mask) {
  Bytes out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= mask[i];
  return out;
}

}  // namespace

IdPrivateKey extract_private_key(const SystemParams& params, const Scalar& master_secret, ByteView id) {
  auto q = hash_to_identity_point(params.tags, id);
  return {Bytes(id.begin(), id.end()), master_secret * q.in_g1, master_secret * q.in_g2};
}

bool verify_private_key(const SystemParams& params, const IdPrivateKey& key) {
  auto q = hash_to_identity_point(params.tags, view(key.owner_id));
  return pair(key.key_g1, params.g2_generator) == pair(q.in_g1, params.master_public_g2) &&
         pair(params.g1_generator, key.key_g2) == pair(params.master_public_g1, q.in_g2);
}

Digest derive_pseudonym(const SystemParams& params, ByteView ev_id, const Scalar& d_ev, const Scalar& a_i) {
  Bytes data(ev_id.begin(), ev_id.end());
  append(data, view((d_ev * a_i).to_bytes()));
  return pseudonym_hash(params.tags, view(data));
}

Scalar pseudonym_exponent(const SystemParams& params, const Digest& pid) {
  return hash_to_scalar(params.tags, view(concat({view(params.ra_identity), view(pid)})));
}

G2Point derive_pseudonym_key(const SystemParams& params, const Scalar& master_secret, const Digest& pid) {
  return eow_hash(master_secret * params.ra_point.in_g2, pseudonym_exponent(params, pid));
}

std::vector<PseudonymRecord> gen_pseudonym_batch(const Scalar& master_secret, const SystemParams& params,
                                                 ByteView ev_id, const Scalar& d_ev, std::size_t count, Rng& rng) {
  if (d_ev.is_zero()) throw Error(ErrorKind::Parameter, "d_EV must be in Z*_q");
  const G2Point s_ra = master_secret * params.ra_point.in_g2;
  std::vector<PseudonymRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PseudonymRecord r;
    r.a_i = Scalar::random(rng);
    r.pid = derive_pseudonym(params, ev_id, d_ev, r.a_i);
    r.k_i = eow_hash(s_ra, pseudonym_exponent(params, r.pid));
    r.index = static_cast<std::uint32_t>(i);
    out.push_back(r);
  }
  return out;
}

Bytes IbeCiphertext::to_bytes() const {
  Bytes out;
  append(out, view(encode(ephemeral_point)));
  append(out, view(masked_payload));
  return out;
}

IbeCiphertext IbeCiphertext::from_bytes(ByteView bytes) {
  if (bytes.size() <= kG1Bytes) throw DecodeError("ephemeral_point", "ciphertext too short");
  auto u = decode_g1(bytes.subspan(0, kG1Bytes));
  if (!u) throw DecodeError("ephemeral_point", "not a valid source-group point");
  auto rest = bytes.subspan(kG1Bytes);
  return {*u, Bytes(rest.begin(), rest.end())};
}

IbeCiphertext ibe_encrypt(const SystemParams& params, ByteView recipient_id, ByteView payload, Rng& rng) {
  if (payload.empty()) throw Error(ErrorKind::Parameter, "ibe_encrypt: empty payload");
  auto q = hash_to_identity_point(params.tags, recipient_id);
  Scalar r = Scalar::random(rng);
  GtElement g = pair(r * params.master_public_g1, q.in_g2);
  return {r * params.g1_generator, xor_bytes(payload, mask_stream(params, g, payload.size()))};
}

Bytes ibe_decrypt(const SystemParams& params, const IdPrivateKey& key, const IbeCiphertext& ct) {
  GtElement g = pair(ct.ephemeral_point, key.key_g2);
  return xor_bytes(view(ct.masked_payload), mask_stream(params, g, ct.masked_payload.size()));
}

void RaRegistry::record(const Identity& ev_id, const Scalar& d_ev, const std::vector<PseudonymRecord>& batch) {
  EvRecord& ev = by_ev_[ev_id];
  ev.d_ev = d_ev;
  for (const auto& r : batch) {
    if (!by_pid_.emplace(r.pid, RegistryEntry{ev_id, r.index}).second) {
      throw Error(ErrorKind::Duplicate, "pseudonym already registered");
    }
    order_.push_back(r.pid);
    ev.a_list.push_back(r.a_i);
    ev.pids.push_back(r.pid);
  }
}

std::optional<RegistryEntry> RaRegistry::lookup(const Digest& pid) const {
  auto it = by_pid_.find(pid);
  if (it == by_pid_.end()) return std::nullopt;
  return it->second;
}

const RaRegistry::EvRecord* RaRegistry::find_ev(const Identity& ev_id) const {
  auto it = by_ev_.find(ev_id);
  return it == by_ev_.end() ? nullptr : &it->second;
}

std::string RaRegistry::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Digest& pid : order_) {
    const RegistryEntry& e = by_pid_.at(pid);
    arr.push_back({{"pid_hex", to_hex(pid)}, {"ev_id", identity_name(e.ev_id)}, {"index", e.index}});
  }
  return arr.dump(2);
}

}  // namespace evc
