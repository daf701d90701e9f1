#pragma once

#include <optional>
#include <string_view>

#include "evc/bytes.hpp"
#include "evc/group.hpp"
#include "evc/hash.hpp"

namespace evc {

/// Parameters the RA publishes at initialization.
struct SystemParams {
  G1Point g1_generator;
  G2Point g2_generator;
  G1Point master_public_g1;  // s * P1
  G2Point master_public_g2;  // s * P2
  bn254::U256 group_order;
  Identity ra_identity{};
  Scalar update_constant;  // public k used for M'_EV = M_EV + k
  HashTags tags;

  // Cached H1(ID_RA); derivable from the fields above.
  PairedIdentityPoint ra_point;

  /// Canonical serialization, used for determinism checks.
  Bytes to_bytes() const;

  /// e(sP1, P2) == e(P1, sP2).
  bool master_public_consistent() const;
};

struct SetupResult {
  SystemParams params;
  Scalar master_secret;
};

/// Deterministic for a fixed seed. A zero override is rejected.
SetupResult setup(ByteView rng_seed, std::optional<Scalar> master_secret_override = std::nullopt,
                  std::string_view ra_name = "RA");

}  // namespace evc
