#include <gtest/gtest.h>
#include <openssl/sha.h>

#include <set>

#include "fixture.hpp"

namespace evc {
namespace {

using testing::Fixture;
using testing::HandshakeHooks;
using testing::Mutator;

Bytes flip(Bytes b, std::size_t byte, unsigned bit) {
  b.at(byte) ^= static_cast<std::uint8_t>(1u << bit);
  return b;
}

std::size_t field_offset(MessageTag tag, const std::string& name) {
  std::size_t off = 0;
  for (const auto& f : schema(tag)) {
    if (f.name == name) return off;
    off += f.width;
  }
  throw std::logic_error("no field " + name);
}

TEST(Registration, EvReceivesOneKeyPerPseudonym) {
  Fixture fx(6);
  Vehicle v(fx.su.params, make_identity("EV-batch"), fx.cfg, fx.root.derive("batch"), fx.ra->public_key(),
            fx.bank->public_key());
  WireMessage m4 = fx.ra->ra_register(EntityKind::EV, v.registration_message(fx.now), fx.now);
  EXPECT_EQ(m4.get("count"), (Bytes{0, 6}));
  EXPECT_EQ(m4.get("k_list").size(), 6 * kG2Bytes);
  EXPECT_EQ(m4.get("a_list").size(), 6 * kScalarBytes);
  EXPECT_EQ(encode(m4).size(), m4_length(6));
}

TEST(Registration, StaleRequestIsRejected) {
  Fixture fx;
  Vehicle v(fx.su.params, make_identity("EV-late"), fx.cfg, fx.root.derive("late"), fx.ra->public_key(),
            fx.bank->public_key());
  WireMessage m3 = v.registration_message(fx.now - fx.cfg.freshness_window_ms - 1);
  try {
    fx.ra->ra_register(EntityKind::EV, m3, fx.now);
    FAIL() << "stale m3 accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Freshness);
  }
}

TEST(Registration, DuplicatesAndEmptyIdentitiesAreRejected) {
  Fixture fx;
  auto expect_kind = [&](EntityKind kind, const WireMessage& m, ErrorKind want) {
    try {
      fx.ra->ra_register(kind, m, fx.now);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), want);
    }
  };
  expect_kind(EntityKind::EV, fx.ev->registration_message(fx.now), ErrorKind::Duplicate);
  expect_kind(EntityKind::CSPA, fx.cspa->registration_message(fx.now), ErrorKind::Duplicate);
  expect_kind(EntityKind::EV, make_message(MessageTag::M3, {{"id_ev", Bytes(32, 0)}, {"t3", u64_field(fx.now)}}),
              ErrorKind::Parameter);
}

TEST(Registration, VehicleRecomputesRegistryPseudonyms) {
  Fixture fx(5);
  const auto* rec = fx.ra->registry().find_ev(fx.ev->id());
  ASSERT_NE(rec, nullptr);
  ASSERT_EQ(fx.ev->pseudonyms().size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& p = fx.ev->pseudonyms()[i];
    EXPECT_EQ(p.pid, rec->pids[i]);
    // Independent recomputation of H4(ID || d * a_i).
    Bytes in(fx.ev->id().begin(), fx.ev->id().end());
    append(in, view((rec->d_ev * rec->a_list[i]).to_bytes()));
    EXPECT_EQ(p.pid, pseudonym_hash(fx.su.params.tags, in));
    auto owner = fx.ra->registry().lookup(p.pid);
    ASSERT_TRUE(owner.has_value());
    EXPECT_EQ(owner->ev_id, fx.ev->id());
  }
}

TEST(Tickets, FreshPerCallAndResolvable) {
  Fixture fx;
  const Digest pid = fx.ev->pseudonyms()[0].pid;
  Ticket a = fx.bank->bank_issue_ticket(pid);
  Ticket b = fx.bank->bank_issue_ticket(pid);
  EXPECT_NE(a.value, b.value);
  EXPECT_EQ(fx.bank->resolve_ticket(a.value), pid);
  EXPECT_EQ(fx.bank->resolve_ticket(b.value), pid);
  Digest unknown{};
  unknown[0] = 1;
  try {
    fx.bank->bank_issue_ticket(unknown);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownPseudonym);
  }
}

TEST(Handshake, NonceMessagesHaveReferenceSizes) {
  Fixture fx;
  WireMessage m5 = fx.ev->ev_begin_auth(fx.now);
  EXPECT_EQ(encode(m5).size(), 104u);
  EXPECT_EQ(fx.ev->session().phase, Phase::NonceSent);
  EXPECT_FALSE(fx.ev->session().r_point_ev.is_identity());
  WireMessage m6 = fx.cspa->cspa_respond("peer", m5, fx.now);
  EXPECT_EQ(encode(m6).size(), 136u);
  EXPECT_EQ(to_digest(m6.get("id_cspa")), fx.cspa->id());
  EXPECT_FALSE(fx.cspa->session("peer")->r_point_cspa.is_identity());
  EXPECT_EQ(fx.cspa->session("peer")->phase, Phase::NonceSent);
}

TEST(Handshake, StaleNonceMessageIsRejected) {
  Fixture fx;
  WireMessage m5 = fx.ev->ev_begin_auth(fx.now - 6000);
  try {
    fx.cspa->cspa_respond("peer", m5, fx.now);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Freshness);
  }
}

TEST(Handshake, HonestRunEstablishesEqualKeys) {
  Fixture fx;
  fx.get_ticket(*fx.ev);
  auto r = fx.handshake(*fx.cspa, *fx.ev);
  ASSERT_FALSE(r.threw);
  EXPECT_EQ(r.ev_phase, Phase::Established);
  EXPECT_EQ(r.cspa_phase, Phase::Established);
  const SessionState& e = fx.ev->session();
  const SessionState& c = *fx.cspa->session("peer");
  EXPECT_TRUE(e.k_shared == c.k_shared);
  EXPECT_EQ(e.k_prime, c.k_prime);
  ASSERT_TRUE(e.session_key && c.session_key);
  EXPECT_EQ(*e.session_key, *c.session_key);
  EXPECT_EQ(e.mac_ev, c.mac_ev);
  EXPECT_EQ(e.mac_cspa, c.mac_cspa);
  // Three suffixes, three distinct digests.
  std::set<Digest> d{e.mac_ev, e.mac_cspa, *e.session_key};
  EXPECT_EQ(d.size(), 3u);
  // Diffie-Hellman consistency on both sides.
  EXPECT_EQ(e.k_prime, e.own_scalar * e.r_point_cspa);
  EXPECT_EQ(c.k_prime, c.own_scalar * c.r_point_ev);
  // The ticket travels with the pseudonym.
  EXPECT_EQ(fx.bank->resolve_ticket(e.ticket), e.pid);
}

// mac_EV, mac_CSPA and sk recomputed with plain SHA-256 over the documented layout:
// len(tag) || tag || k || k' || ID_CSPA || pid || N_EV || N_CSPA || suffix, suffixes 00, 10, 01 as 0x00, 0x02, 0x01.
TEST(Handshake, SessionDigestsMatchShaOracle) {
  Fixture fx;
  auto r = fx.handshake(*fx.cspa, *fx.ev);
  ASSERT_FALSE(r.threw);
  const SessionState& e = fx.ev->session();
  auto oracle = [&](std::uint8_t suffix) {
    const std::string tag = "EVC/H3/digest";
    Bytes buf{static_cast<std::uint8_t>(tag.size())};
    buf.insert(buf.end(), tag.begin(), tag.end());
    for (ByteView part : {view(encode(e.k_shared)), view(encode(e.k_prime)), view(fx.cspa->id()), view(e.pid),
                          view(e.n_ev), view(e.n_cspa)}) {
      buf.insert(buf.end(), part.begin(), part.end());
    }
    buf.push_back(suffix);
    Digest d{};
    SHA256(buf.data(), buf.size(), d.data());
    return d;
  };
  EXPECT_EQ(e.mac_ev, oracle(0x00));
  EXPECT_EQ(e.mac_cspa, oracle(0x02));
  EXPECT_EQ(*e.session_key, oracle(0x01));
}

TEST(Handshake, HundredRandomizedHandshakesAgree) {
  Fixture fx(100, "hundred");
  for (int i = 0; i < 100; ++i) {
    auto r = fx.handshake(*fx.cspa, *fx.ev);
    ASSERT_FALSE(r.threw) << "handshake " << i;
    const SessionState& e = fx.ev->session();
    const SessionState& c = *fx.cspa->session("peer");
    ASSERT_EQ(r.ev_phase, Phase::Established);
    ASSERT_TRUE(e.k_shared == c.k_shared) << i;
    ASSERT_EQ(*e.session_key, *c.session_key) << i;
  }
}

TEST(Handshake, TokenIsMaskedWithPseudonym) {
  Fixture fx;
  auto r = fx.handshake(*fx.cspa, *fx.ev);
  ASSERT_TRUE(r.issue);
  const Digest pid = fx.ev->session().pid;
  EXPECT_EQ(r.issue->m8.digest("masked_token"), xor_digest(r.issue->token.value, pid));
  ASSERT_TRUE(fx.ev->session().token);
  EXPECT_EQ(fx.ev->session().token->value, r.issue->token.value);
  EXPECT_EQ(*fx.ev->token_hash(), r.issue->token_hash);
  EXPECT_EQ(encode(r.issue->m8).size(), 72u);
  EXPECT_EQ(encode(r.issue->m9).size(), 104u);
  EXPECT_EQ(r.issue->m9.digest("sk"), *fx.cspa->session("peer")->session_key);
}

TEST(Handshake, FlippedResponderNonceFailsAtCspa) {
  Fixture fx;
  HandshakeHooks h;
  h.m6 = [](Bytes& b) { b[5] ^= 0x10; };  // inside n_cspa
  auto r = fx.handshake(*fx.cspa, *fx.ev, h);
  EXPECT_TRUE(r.threw);
  EXPECT_EQ(r.error, ErrorKind::Auth);
  EXPECT_FALSE(r.issue.has_value());
  EXPECT_EQ(r.cspa_phase, Phase::Failed);
  EXPECT_EQ(fx.cspa->tokens_issued(), 0u);
}

TEST(Handshake, SubstitutedInitiatorNonceFailsAtCspa) {
  Fixture fx;
  HandshakeHooks h;
  h.m5 = [](Bytes& b) { b[0] ^= 0xff; };
  auto r = fx.handshake(*fx.cspa, *fx.ev, h);
  EXPECT_TRUE(r.threw);
  EXPECT_EQ(r.error, ErrorKind::Auth);
  EXPECT_FALSE(r.issue.has_value());
}

TEST(Handshake, TamperedMacCspaFailsAtVehicle) {
  Fixture fx;
  HandshakeHooks h;
  h.m8 = [](Bytes& b) { b[0] ^= 0x01; };
  auto r = fx.handshake(*fx.cspa, *fx.ev, h);
  EXPECT_FALSE(r.threw);
  EXPECT_EQ(r.ev_phase, Phase::Failed);
  EXPECT_FALSE(fx.ev->session().session_key.has_value());
}

TEST(Handshake, StaleTokenMessageIsRejected) {
  Fixture fx;
  WireMessage m5 = fx.ev->ev_begin_auth(fx.now);
  Bytes m7 = fx.ev->ev_compute_mac(fx.cspa->cspa_respond("peer", m5, fx.now), fx.now);
  TokenIssue issue = fx.cspa->cspa_verify_and_issue_token("peer", m7, fx.now);
  try {
    fx.ev->ev_verify_cspa(issue.m8, fx.now + fx.cfg.freshness_window_ms + 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Freshness);
  }
  EXPECT_EQ(fx.ev->session().phase, Phase::Failed);
}

TEST(Handshake, ReplayedMacMessageIsDoubleSpend) {
  Fixture fx;
  WireMessage m5 = fx.ev->ev_begin_auth(fx.now);
  Bytes m7 = fx.ev->ev_compute_mac(fx.cspa->cspa_respond("peer", m5, fx.now), fx.now);
  fx.cspa->cspa_verify_and_issue_token("peer", m7, fx.now);
  try {
    fx.cspa->cspa_verify_and_issue_token("peer", m7, fx.now + 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DoubleSpend);
  }
  EXPECT_EQ(fx.cspa->tokens_issued(), 1u);
}

TEST(Handshake, PhasesOnlyMoveForward) {
  SessionState s;
  EXPECT_THROW(s.advance(Phase::MacSent), Error);
  s.advance(Phase::NonceSent);
  EXPECT_THROW(s.advance(Phase::Established), Error);
  EXPECT_THROW(s.advance(Phase::NonceSent), Error);
  s.advance(Phase::MacSent);
  s.advance(Phase::Established);
  EXPECT_THROW(s.advance(Phase::Failed), Error);
  EXPECT_THROW(s.advance(Phase::Idle), Error);
  SessionState f;
  f.advance(Phase::NonceSent);
  f.advance(Phase::Failed);
  EXPECT_THROW(f.advance(Phase::Established), Error);
}

// Every single-bit flip inside a mac-covered field of m5-m8 leaves at least one side
// short of Established, and never yields two Established sides with different keys.
TEST(Handshake, BitFlipsOnAuthenticatedFieldsNeverEstablish) {
  Fixture fx(2, "bitflip");
  Rng pick = Rng::from_string("bitflip/positions");
  struct Target {
    MessageTag tag;
    std::string field;
  };
  const std::vector<Target> plain = {{MessageTag::M5, "n_ev"},      {MessageTag::M5, "r_ev_p"},
                                     {MessageTag::M6, "n_cspa"},    {MessageTag::M6, "r_cspa_p"},
                                     {MessageTag::M6, "id_cspa"},   {MessageTag::M8, "mac_cspa"}};
  std::size_t trials = 0;
  auto run = [&](const HandshakeHooks& h, const std::string& what) {
    auto c = fx.clone_cspa(what);
    auto r = fx.handshake(*c, *fx.ev, h, /*reuse=*/true);
    const bool both = r.ev_phase == Phase::Established && r.cspa_phase == Phase::Established;
    EXPECT_FALSE(both) << what;
    ++trials;
  };
  for (const auto& t : plain) {
    const std::size_t off = field_offset(t.tag, t.field);
    std::size_t width = 0;
    for (const auto& f : schema(t.tag)) {
      if (f.name == t.field) width = f.width;
    }
    for (std::size_t i = 0; i < width; ++i) {
      const unsigned bit = static_cast<unsigned>(pick.next_u64() % 8);
      HandshakeHooks h;
      Mutator m = [=](Bytes& b) { b = flip(b, off + i, bit); };
      if (t.tag == MessageTag::M5) h.m5 = m;
      if (t.tag == MessageTag::M6) h.m6 = m;
      if (t.tag == MessageTag::M8) h.m8 = m;
      run(h, std::string(tag_name(t.tag)) + "." + t.field + "[" + std::to_string(i) + "]");
    }
  }
  // m7 travels as an IBE ciphertext: ephemeral point, then the masked payload.
  const std::size_t payload = kG1Bytes;
  std::vector<std::pair<std::size_t, std::size_t>> m7_ranges = {
      {0, kG1Bytes},
      {payload + field_offset(MessageTag::M7, "id_ra"), 32},
      {payload + field_offset(MessageTag::M7, "pid"), 32},
      {payload + field_offset(MessageTag::M7, "mac_ev"), 32},
  };
  for (auto [start, width] : m7_ranges) {
    for (std::size_t i = 0; i < width; ++i) {
      const unsigned bit = static_cast<unsigned>(pick.next_u64() % 8);
      HandshakeHooks h;
      h.m7 = [=](Bytes& b) { b = flip(b, start + i, bit); };
      run(h, "m7[" + std::to_string(start + i) + "]");
    }
  }
  EXPECT_EQ(trials, 416u);
}

// Fields outside mac_EV's input are caught later: a changed ticket at the Bank,
// a changed masked token at the first pad.
TEST(Handshake, UncoveredFieldsAreCaughtDownstream) {
  Fixture fx(2, "uncovered");
  fx.get_ticket(*fx.ev);
  HandshakeHooks h;
  const std::size_t ticket = kG1Bytes + field_offset(MessageTag::M7, "ticket");
  h.m7 = [=](Bytes& b) { b[ticket] ^= 0x01; };
  auto r = fx.handshake(*fx.cspa, *fx.ev, h);
  ASSERT_TRUE(r.issue);
  auto orders = fx.cspa->cspa_settle_due(fx.now + fx.cfg.token_validity_ms);
  ASSERT_EQ(orders.size(), 1u);
  try {
    fx.bank->bank_bill(orders[0].m18, fx.now + fx.cfg.token_validity_ms);
    FAIL() << "altered ticket settled";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Settlement);
  }

  // Masked token flip: the EV derives a different chain from the one the RSU announces.
  auto v2 = fx.make_vehicle("EV-2");
  HandshakeHooks h2;
  const std::size_t masked = field_offset(MessageTag::M8, "masked_token");
  h2.m8 = [=](Bytes& b) { b[masked] ^= 0x80; };
  auto r2 = fx.handshake(*fx.cspa, *v2, h2);
  ASSERT_TRUE(r2.issue);
  EXPECT_NE(*v2->token_hash(), r2.issue->token_hash);
}

TEST(Admission, HonestRsuAnswersIncrementedNonce) {
  Fixture fx;
  auto r = fx.handshake(*fx.cspa, *fx.ev);
  ASSERT_TRUE(r.issue);
  Rng rr = fx.root.derive("rsu");
  Rng keys = fx.root.derive("rsu-keys");
  RoadsideUnit rsu(fx.su.params, 0, 3, 5, fx.cfg, rr, fx.gk_rsu_cspa, GroupKey::random(rsu_cp_key_id(0), keys));
  rsu.on_token_distribution(r.issue->sealed_m9, fx.now);
  Bytes m10 = fx.ev->ev_request_rsu(0, fx.now);
  EXPECT_EQ(m10.size(), 72 + kEnvelopeOverhead);
  Admission a = rsu.rsu_admit(m10, fx.now);
  EXPECT_EQ(a.pid, fx.ev->session().pid);
  EXPECT_EQ(a.sealed_m11.size(), 73 + kEnvelopeOverhead);
  EXPECT_EQ(encode(a.m12).size(), 72u);
  ASSERT_NO_THROW(fx.ev->on_rsu_admit(0, 5, a.sealed_m11, fx.now));

  // The EV's independently built chain matches what the RSU broadcasts to its pads.
  const ChainState& chain = fx.ev->segment()->chain;
  EXPECT_EQ(chain.n, 5 + fx.cfg.chain_margin);
  EXPECT_EQ(chain.head, a.m12.digest("chain_head"));
  EXPECT_EQ(chain.anchor, a.m12.digest("anchor"));
  const Digest ht = r.issue->token_hash;
  const Digest m_ev = chain.m_ev_hash;  // h(M_EV)
  EXPECT_EQ(chain.base, concat({view(ht), view(m_ev)}));
}

TEST(Admission, NonceCheckCatchesWrongReply) {
  Fixture fx;
  auto r = fx.handshake(*fx.cspa, *fx.ev);
  ASSERT_TRUE(r.issue);
  fx.ev->ev_request_rsu(0, fx.now);
  Rng rng = fx.root.derive("forged-m11");
  // A reply sealed under the right key but echoing the nonce without the increment.
  const SessionState& s = fx.ev->session();
  WireMessage bad = make_message(MessageTag::M11, {{"n_rsu_plus_1", field(rng.digest())},
                                                   {"m_ev", field(rng.digest())},
                                                   {"t11", u64_field(fx.now)},
                                                   {"rate", u8_field(3)}});
  Bytes sealed = seal_group(session_group_key(*s.session_key), encode(bad), rng).to_bytes();
  try {
    fx.ev->on_rsu_admit(0, 5, sealed, fx.now);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Auth);
  }
}

TEST(Admission, UnknownPseudonymOrKeyIsRejected) {
  Fixture fx;
  auto r = fx.handshake(*fx.cspa, *fx.ev);
  ASSERT_TRUE(r.issue);
  Rng keys = fx.root.derive("rsu-keys");
  RoadsideUnit rsu(fx.su.params, 0, 3, 5, fx.cfg, fx.root.derive("rsu"), fx.gk_rsu_cspa,
                   GroupKey::random(rsu_cp_key_id(0), keys));
  Bytes m10 = fx.ev->ev_request_rsu(0, fx.now);
  // No m9 delivered: nothing opens the request.
  try {
    rsu.rsu_admit(m10, fx.now);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Admission);
  }
  // An m9 for some other session does not help either.
  WireMessage other = r.issue->m9;
  Rng rr = Rng::from_string("other-sk");
  other = make_message(MessageTag::M9, {{"token_hash", field(rr.digest())},
                                        {"pid", other.get("pid")},
                                        {"sk", field(rr.digest())},
                                        {"t9", u64_field(fx.now)}});
  rsu.on_token_distribution(other, fx.now);
  EXPECT_THROW(rsu.rsu_admit(m10, fx.now), Error);
}

TEST(Freshness, WindowBoundaries) {
  ProtocolConfig cfg;
  cfg.freshness_window_ms = 5000;
  EXPECT_NO_THROW(check_fresh(cfg, 10000, 15000, "x"));
  EXPECT_THROW(check_fresh(cfg, 9999, 15000, "x"), Error);
  EXPECT_THROW(check_fresh(cfg, 15001, 15000, "x"), Error);
  EXPECT_NO_THROW(check_fresh(cfg, 15000, 15000, "x"));
  cfg.check_timestamps = false;
  EXPECT_NO_THROW(check_fresh(cfg, 0, 15000, "x"));
}

TEST(Identity, OnlyRegistrationCarriesTheRealIdentity) {
  for (auto tag : all_tags()) {
    if (tag == MessageTag::M3) continue;
    for (const auto& f : schema(tag)) EXPECT_NE(f.name, "id_ev") << tag_name(tag);
  }
}

}  // namespace
}  // namespace evc
