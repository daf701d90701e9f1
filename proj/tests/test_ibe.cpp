// Key extraction, pseudonym suite, BasicIdent encryption and the RA registry.
#include <gtest/gtest.h>

#include <json.hpp>
#include <set>

#include "evc/errors.hpp"
#include "evc/hash.hpp"
#include "evc/ibe.hpp"
#include "evc/rng.hpp"

using namespace evc;

namespace {

Bytes str_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

struct Fixture : ::testing::Test {
  SetupResult sr = setup(str_bytes("ibe-tests"));
  const SystemParams& params = sr.params;
  const Scalar& s = sr.master_secret;
};

}  // namespace

TEST_F(Fixture, UnitMasterSecretGivesHashPoints) {
  auto one = setup(str_bytes("ibe-tests"), Scalar::from_u64(1));
  IdPrivateKey k = extract_private_key(one.params, one.master_secret, str_bytes("CSPA"));
  auto q = hash_to_identity_point(one.params.tags, str_bytes("CSPA"));
  EXPECT_EQ(k.key_g1, q.in_g1);
  EXPECT_EQ(k.key_g2, q.in_g2);
}

TEST_F(Fixture, ExtractionDeterministic) {
  auto a = extract_private_key(params, s, str_bytes("EV-7"));
  auto b = extract_private_key(params, s, str_bytes("EV-7"));
  EXPECT_EQ(a.key_g1, b.key_g1);
  EXPECT_EQ(a.key_g2, b.key_g2);
}

TEST(Extraction, PairingVerificationRandomized) {
  Rng rng = Rng::from_string("extract");
  for (int i = 0; i < 100; ++i) {
    auto sr = setup(rng.bytes(16));
    Bytes id = rng.bytes(1 + rng.next_u64() % 32);
    IdPrivateKey key = extract_private_key(sr.params, sr.master_secret, id);
    // Independent evaluation of both sides of each pairing relation.
    auto q = hash_to_identity_point(sr.params.tags, id);
    ASSERT_EQ(encode(pair(key.key_g1, G2Point::generator())), encode(pair(q.in_g1, sr.params.master_public_g2)));
    ASSERT_TRUE(verify_private_key(sr.params, key));
  }
}

TEST_F(Fixture, ForgedKeyFailsVerification) {
  IdPrivateKey key = extract_private_key(params, s, str_bytes("CSPA"));
  key.key_g1 = key.key_g1 + G1Point::generator();
  EXPECT_FALSE(verify_private_key(params, key));
}

TEST_F(Fixture, PseudonymBatchBasics) {
  Rng rng = Rng::from_string("batch");
  Identity ev = make_identity("EV-1");
  Scalar d = Scalar::random(rng);
  EXPECT_TRUE(gen_pseudonym_batch(s, params, view(ev), d, 0, rng).empty());

  auto batch = gen_pseudonym_batch(s, params, view(ev), d, 16, rng);
  ASSERT_EQ(batch.size(), 16u);
  std::set<Digest> pids;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& r = batch[i];
    EXPECT_EQ(r.index, i);
    EXPECT_TRUE(pids.insert(r.pid).second);
    EXPECT_EQ(r.pid, derive_pseudonym(params, view(ev), d, r.a_i));
    // k_i == h(s * H1_g2(ID_RA), H2(ID_RA || pid)), rebuilt from raw pieces.
    auto ra = hash_to_identity_point(params.tags, view(params.ra_identity));
    Scalar x = hash_to_scalar(params.tags, view(concat({view(params.ra_identity), view(r.pid)})));
    EXPECT_EQ(r.k_i, x * (s * ra.in_g2));
  }
}

TEST_F(Fixture, PseudonymDeterministic) {
  Identity ev = make_identity("EV-1");
  Scalar d = Scalar::from_u64(11), a = Scalar::from_u64(13);
  EXPECT_EQ(derive_pseudonym(params, view(ev), d, a), derive_pseudonym(params, view(ev), d, a));
  // Only the product d * a enters the hash.
  EXPECT_EQ(derive_pseudonym(params, view(ev), d, a), derive_pseudonym(params, view(ev), a, d));
  EXPECT_NE(derive_pseudonym(params, view(ev), d, a), derive_pseudonym(params, view(ev), d, Scalar::from_u64(14)));
}

TEST(KeyAgreementCore, BothSidesAgree) {
  Rng rng = Rng::from_string("core");
  for (int i = 0; i < 100; ++i) {
    auto sr = setup(rng.bytes(16));
    const auto& p = sr.params;
    Bytes cspa_id = rng.bytes(12);
    Identity ev = make_identity("EV");
    auto batch = gen_pseudonym_batch(sr.master_secret, p, view(ev), Scalar::random(rng), 1, rng);
    auto q = hash_to_identity_point(p.tags, cspa_id);
    GtElement ev_side = pair(q.in_g1, batch[0].k_i);
    GtElement cspa_side = pair(sr.master_secret * q.in_g1, eow_hash(p.ra_point.in_g2, pseudonym_exponent(p, batch[0].pid)));
    ASSERT_EQ(encode(ev_side), encode(cspa_side));
  }
}

TEST_F(Fixture, PseudonymBitBalanceAndNoCollisions) {
  Rng rng = Rng::from_string("balance");
  Identity ev = make_identity("EV-balance");
  Scalar d = Scalar::random(rng);
  std::array<int, 256> ones{};
  std::set<Digest> seen;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Digest pid = derive_pseudonym(params, view(ev), d, Scalar::random(rng));
    ASSERT_TRUE(seen.insert(pid).second);
    for (int b = 0; b < 256; ++b) ones[static_cast<std::size_t>(b)] += (pid[static_cast<std::size_t>(b / 8)] >> (b % 8)) & 1;
  }
  for (int b = 0; b < 256; ++b) {
    double f = ones[static_cast<std::size_t>(b)] / static_cast<double>(n);
    EXPECT_NEAR(f, 0.5, 0.05) << "bit " << b;
  }
}

TEST_F(Fixture, IbeRoundTripAllLengths) {
  Rng rng = Rng::from_string("ibe-lengths");
  Bytes id = str_bytes("CSPA");
  IdPrivateKey key = extract_private_key(params, s, id);
  for (std::size_t len = 1; len <= 4096; ++len) {
    Bytes m = rng.bytes(len);
    IbeCiphertext ct = ibe_encrypt(params, id, m, rng);
    ASSERT_EQ(ct.masked_payload.size(), len);
    ASSERT_EQ(ibe_decrypt(params, key, IbeCiphertext::from_bytes(ct.to_bytes())), m) << "length " << len;
  }
}

TEST_F(Fixture, IbeWrongKeyAndFreshEphemeral) {
  Rng rng = Rng::from_string("ibe-wrong");
  Bytes m = rng.bytes(100);
  IbeCiphertext a = ibe_encrypt(params, str_bytes("CSPA"), m, rng);
  IbeCiphertext b = ibe_encrypt(params, str_bytes("CSPA"), m, rng);
  EXPECT_NE(a.ephemeral_point, b.ephemeral_point);
  EXPECT_NE(a.masked_payload, b.masked_payload);
  IdPrivateKey other = extract_private_key(params, s, str_bytes("CSPB"));
  EXPECT_NE(ibe_decrypt(params, other, a), m);
  EXPECT_THROW(ibe_encrypt(params, str_bytes("CSPA"), {}, rng), Error);
}

TEST_F(Fixture, IbeFlippedEphemeralBreaksEmbeddedMac) {
  Rng rng = Rng::from_string("ibe-flip");
  IdPrivateKey key = extract_private_key(params, s, str_bytes("CSPA"));
  for (int i = 0; i < 5; ++i) {
    Bytes body = rng.bytes(64);
    Digest mac = hash_to_digest(params.tags, view(body));
    Bytes payload = concat({view(body), view(mac)});
    Bytes wire = ibe_encrypt(params, str_bytes("CSPA"), payload, rng).to_bytes();
    // Flip the low bit of y; if the result is off-curve, decoding rejects it outright.
    wire[63] ^= 1;
    IbeCiphertext ct;
    try {
      ct = IbeCiphertext::from_bytes(wire);
    } catch (const DecodeError& e) {
      EXPECT_EQ(e.field(), "ephemeral_point");
      continue;
    }
    Bytes got = ibe_decrypt(params, key, ct);
    Bytes got_body(got.begin(), got.begin() + 64);
    EXPECT_NE(hash_to_digest(params.tags, view(got_body)), to_digest(ByteView(got).subspan(64)));
  }
}

TEST_F(Fixture, RegistryLookupAndJson) {
  Rng rng = Rng::from_string("reg");
  Identity ev = make_identity("EV-9");
  Scalar d = Scalar::random(rng);
  auto batch = gen_pseudonym_batch(s, params, view(ev), d, 3, rng);
  RaRegistry reg;
  reg.record(ev, d, batch);
  EXPECT_EQ(reg.size(), 3u);
  auto hit = reg.lookup(batch[2].pid);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->ev_id, ev);
  EXPECT_EQ(hit->index, 2u);
  EXPECT_FALSE(reg.lookup(Digest{}).has_value());
  ASSERT_NE(reg.find_ev(ev), nullptr);
  EXPECT_EQ(reg.find_ev(ev)->d_ev, d);
  EXPECT_THROW(reg.record(ev, d, batch), Error);

  auto j = nlohmann::json::parse(reg.to_json());
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["ev_id"], "EV-9");
  EXPECT_EQ(j[1]["index"], 1);
  EXPECT_EQ(j[1]["pid_hex"], to_hex(batch[1].pid));
}
