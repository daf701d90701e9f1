#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evc/bytes.hpp"
#include "evc/group.hpp"
#include "evc/params.hpp"

namespace evc {

class Rng;

/// s * H1(ID) on both pairing sides.
struct IdPrivateKey {
  Bytes owner_id;
  G1Point key_g1;
  G2Point key_g2;
};

IdPrivateKey extract_private_key(const SystemParams& params, const Scalar& master_secret, ByteView id);

/// Public check: e(key_g1, P2) == e(H1_g1(ID), sP2) and e(P1, key_g2) == e(sP1, H1_g2(ID)).
bool verify_private_key(const SystemParams& params, const IdPrivateKey& key);

struct PseudonymRecord {
  Digest pid{};
  G2Point k_i;
  Scalar a_i;
  std::uint32_t index = 0;
};

/// H4(ID_EV || encode(d_EV * a_i mod q)).
Digest derive_pseudonym(const SystemParams& params, ByteView ev_id, const Scalar& d_ev, const Scalar& a_i);

/// H2(ID_RA || pid), the exponent fed to the e-one-way hash for pseudonym keys.
Scalar pseudonym_exponent(const SystemParams& params, const Digest& pid);

/// k_i = h(s * H1_g2(ID_RA), H2(ID_RA || pid)).
G2Point derive_pseudonym_key(const SystemParams& params, const Scalar& master_secret, const Digest& pid);

std::vector<PseudonymRecord> gen_pseudonym_batch(const Scalar& master_secret, const SystemParams& params,
                                                 ByteView ev_id, const Scalar& d_ev, std::size_t count, Rng& rng);

/// BasicIdent ciphertext. Wire form: 64-byte ephemeral point || masked payload.
struct IbeCiphertext {
  G1Point ephemeral_point;
  Bytes masked_payload;

  Bytes to_bytes() const;
  static IbeCiphertext from_bytes(ByteView bytes);
};

IbeCiphertext ibe_encrypt(const SystemParams& params, ByteView recipient_id, ByteView payload, Rng& rng);
Bytes ibe_decrypt(const SystemParams& params, const IdPrivateKey& key, const IbeCiphertext& ct);

struct RegistryEntry {
  Identity ev_id{};
  std::uint32_t index = 0;
};

/// RA-side table of issued pseudonyms: pid -> (ID_EV, index), plus each EV's generation inputs.
class RaRegistry {
 public:
  struct EvRecord {
    Scalar d_ev;
    std::vector<Scalar> a_list;
    std::vector<Digest> pids;
  };

  void record(const Identity& ev_id, const Scalar& d_ev, const std::vector<PseudonymRecord>& batch);
  std::optional<RegistryEntry> lookup(const Digest& pid) const;
  const EvRecord* find_ev(const Identity& ev_id) const;
  std::size_t size() const { return by_pid_.size(); }

  /// JSON array of {pid_hex, ev_id, index} in issue order.
  std::string to_json() const;

 private:
  std::map<Digest, RegistryEntry> by_pid_;
  std::vector<Digest> order_;
  std::map<Identity, EvRecord> by_ev_;
};

}  // namespace evc
