#include "evc/params.hpp"

#include "evc/errors.hpp"
#include "evc/rng.hpp"

namespace evc {

Bytes SystemParams::to_bytes() const {
  Bytes out;
  append(out, view(encode(g1_generator)));
  append(out, view(encode(g2_generator)));
  append(out, view(encode(master_public_g1)));
  append(out, view(encode(master_public_g2)));
  std::array<std::uint8_t, 32> q;
  group_order.to_be_bytes(q);
  append(out, view(q));
  append(out, view(ra_identity));
  append(out, view(update_constant.to_bytes()));
  for (const std::string* t : {&tags.h1, &tags.h2, &tags.h3, &tags.h4}) {
    out.push_back(static_cast<std::uint8_t>(t->size()));
    out.insert(out.end(), t->begin(), t->end());
  }
  return out;
}

bool SystemParams::master_public_consistent() const {
  return pair(master_public_g1, g2_generator) == pair(g1_generator, master_public_g2);
}

SetupResult setup(ByteView rng_seed, std::optional<Scalar> master_secret_override, std::string_view ra_name) {
  Rng rng = Rng(rng_seed).derive("RA/setup");
  Scalar s;
  if (master_secret_override) {
    if (master_secret_override->is_zero()) throw Error(ErrorKind::Parameter, "master secret must be in Z*_q");
    s = *master_secret_override;
    // Keep the rest of the stream aligned with the non-override case.
    (void)Scalar::random(rng);
  } else {
    s = Scalar::random(rng);
  }

  SystemParams p;
  p.g1_generator = G1Point::generator();
  p.g2_generator = G2Point::generator();
  p.master_public_g1 = s * p.g1_generator;
  p.master_public_g2 = s * p.g2_generator;
  p.group_order = bn254::Fr::kModulus;
  p.ra_identity = make_identity(ra_name);
  p.update_constant = Scalar::random(rng);
  p.ra_point = hash_to_identity_point(p.tags, view(p.ra_identity));
  return {p, s};
}

}  // namespace evc
