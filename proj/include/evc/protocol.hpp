#pragma once

// Shared protocol vocabulary: configuration, session state, and the key-agreement formulas
// used by the EV and CSPA state machines.

#include <optional>
#include <string>
#include <string_view>

#include "evc/billing.hpp"
#include "evc/bytes.hpp"
#include "evc/group.hpp"
#include "evc/ibe.hpp"
#include "evc/params.hpp"
#include "evc/wire.hpp"

namespace evc {

struct ProtocolConfig {
  Millis freshness_window_ms = 5000;
  Millis token_validity_ms = 600000;
  std::size_t pseudonym_batch = 16;
  std::size_t chain_margin = 2;  // chain length n = pads in segment + margin
  bool check_timestamps = true;  // test hook; disabling it removes replay protection
};

/// Throws FreshnessError when t is in the future or older than the window.
void check_fresh(const ProtocolConfig& cfg, Millis t, Millis now, std::string_view what);

enum class Phase { Idle, NonceSent, MacSent, Established, Failed };
std::string_view to_string(Phase p);

enum class Role { EV, CSPA };

struct Token {
  Digest value{};
  Millis issued_at = 0;
  Millis validity = 0;

  Millis expires_at() const { return issued_at + validity; }
  bool expired(Millis now) const { return now >= expires_at(); }
};

struct Ticket {
  TicketBytes value{};
  Digest pid{};
};

struct SessionState {
  Role role = Role::EV;
  Digest n_ev{}, n_cspa{};
  G1Point r_point_ev, r_point_cspa;
  Scalar own_scalar;
  GtElement k_shared;
  G1Point k_prime;
  Digest mac_ev{}, mac_cspa{};
  std::optional<Digest> session_key;
  std::optional<Token> token;
  Phase phase = Phase::Idle;

  Digest pid{};
  TicketBytes ticket{};
  Identity id_cspa{};

  /// Monotone Idle -> NonceSent -> MacSent -> Established; Failed from any non-final phase.
  void advance(Phase to);
};

// Suffix byte appended to the H3 input for each derived value.
constexpr std::uint8_t kMacEvSuffix = 0x00;
constexpr std::uint8_t kSessionKeySuffix = 0x01;
constexpr std::uint8_t kMacCspaSuffix = 0x02;  // the 2-bit "10"

/// H3(k || k' || ID_CSPA || pid || N_EV || N_CSPA || suffix).
Digest session_digest(const SystemParams& params, const GtElement& k, const G1Point& k_prime, const Identity& id_cspa,
                      const Digest& pid, const Digest& n_ev, const Digest& n_cspa, std::uint8_t suffix);

/// EV side: e(H1_g1(ID_CSPA), k_i).
GtElement ev_shared_key(const SystemParams& params, const Identity& id_cspa, const G2Point& k_i);
/// CSPA side: e(K_CSPA, h(H1_g2(ID_RA), H2(ID_RA || pid))).
GtElement cspa_shared_key(const SystemParams& params, const IdPrivateKey& k_cspa, const Digest& pid);

/// M'_EV = M_EV + k mod 2^256.
Digest m_ev_prime(const SystemParams& params, const Digest& m_ev);

/// Group key derived from a session key, used for m10/m11.
GroupKey session_group_key(const Digest& sk);

constexpr std::uint32_t kSessionKeyId = 0;
constexpr std::uint32_t kRsuCspaKeyId = 1;
inline std::uint32_t rsu_cp_key_id(std::uint32_t rsu) { return 1000 + rsu; }
inline std::uint32_t cp_group_key_id(std::uint32_t rsu) { return 2000 + rsu; }

}  // namespace evc
