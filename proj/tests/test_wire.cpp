// Message codecs, the group-key envelope and the hexdump format.
#include <gtest/gtest.h>

#include "evc/errors.hpp"
#include "evc/group.hpp"
#include "evc/rng.hpp"
#include "evc/wire.hpp"

using namespace evc;

namespace {

WireMessage random_message(MessageTag tag, Rng& rng, std::size_t items = 3) {
  std::vector<WireField> fields;
  for (const auto& f : schema(tag)) {
    if (f.name == "count") {
      fields.push_back({std::string(f.name), Bytes{0, static_cast<std::uint8_t>(items)}});
    } else {
      fields.push_back({std::string(f.name), rng.bytes(f.repeated ? f.width * items : f.width)});
    }
  }
  return make_message(tag, fields);
}

}  // namespace

TEST(Sizes, MatchTableFive) {
  // Plaintext field sums, m7 being the corrected 168.
  const std::pair<MessageTag, std::size_t> expected[] = {
      {MessageTag::M5, 104}, {MessageTag::M6, 136}, {MessageTag::M7, 168}, {MessageTag::M8, 72},
      {MessageTag::M9, 104}, {MessageTag::M10, 72}, {MessageTag::M11, 73}, {MessageTag::M12, 72},
      {MessageTag::M13, 33}, {MessageTag::M14, 32}, {MessageTag::M15, 65}, {MessageTag::M16, 40},
  };
  for (auto [tag, len] : expected) EXPECT_EQ(encoded_length(tag), len) << tag_name(tag);
}

TEST(Sizes, ReferenceRowsAgreeExceptM7) {
  for (const auto& row : reference_sizes()) {
    if (row.tag == MessageTag::M7) {
      EXPECT_EQ(row.printed_bytes, 170u);
      EXPECT_EQ(*encoded_length(row.tag), 168u);
    } else {
      EXPECT_EQ(*encoded_length(row.tag), row.printed_bytes) << tag_name(row.tag);
    }
  }
}

TEST(Sizes, BillingAndRegistrationMessages) {
  EXPECT_EQ(encoded_length(MessageTag::M17), 48u);
  EXPECT_EQ(encoded_length(MessageTag::M18), 80u);
  EXPECT_EQ(encoded_length(MessageTag::M19), 16u);
  EXPECT_EQ(encoded_length(MessageTag::M1), 40u);
  EXPECT_EQ(encoded_length(MessageTag::M2), 200u);
  EXPECT_FALSE(encoded_length(MessageTag::M4).has_value());
  EXPECT_EQ(m4_length(16), 64u + 128 + 32 + 2 + 16 * (32 + 128) + 8);
}

TEST(Codec, RoundTripEveryKind) {
  Rng rng = Rng::from_string("codec");
  for (MessageTag tag : all_tags()) {
    for (int rep = 0; rep < 5; ++rep) {
      WireMessage m = random_message(tag, rng, static_cast<std::size_t>(rep));
      Bytes enc = encode(m);
      if (auto len = encoded_length(tag)) {
        EXPECT_EQ(enc.size(), *len);
      }
      EXPECT_EQ(decode(tag, enc), m) << tag_name(tag);
    }
  }
}

TEST(Codec, GoldenM5) {
  WireMessage m = make_message(MessageTag::M5, {{"n_ev", Bytes(32, 0x01)},
                                                {"r_ev_p", field(encode(G1Point::generator()))},
                                                {"t5", u64_field(0x0102030405060708ULL)}});
  std::string want = std::string(64, '0');
  for (int i = 0; i < 32; ++i) want.replace(static_cast<std::size_t>(2 * i), 2, "01");
  want += std::string(63, '0') + "1" + std::string(63, '0') + "2" + "0102030405060708";
  EXPECT_EQ(to_hex(encode(m)), want);
}

TEST(Codec, GoldenM13) {
  WireMessage m = make_message(MessageTag::M13, {{"flag", u8_field(1)}, {"value", Bytes(32, 0xab)}});
  Bytes enc = encode(m);
  ASSERT_EQ(enc.size(), 33u);
  EXPECT_EQ(enc[0], 1);
  EXPECT_EQ(enc[32], 0xab);
}

TEST(Codec, WrongWidthNamesField) {
  try {
    make_message(MessageTag::M10, {{"pid", Bytes(32)}, {"n_rsu", Bytes(31)}, {"t10", Bytes(8)}});
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.field(), "n_rsu");
    EXPECT_EQ(e.kind(), ErrorKind::Decode);
  }
  try {
    decode(MessageTag::M16, Bytes(39));
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.field(), "t16");
  }
  try {
    decode(MessageTag::M16, Bytes(41));
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.field(), "t16");
  }
  try {
    decode(MessageTag::M5, Bytes(40));
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.field(), "r_ev_p");
  }
}

TEST(Codec, UnknownTag) {
  EXPECT_FALSE(tag_from_int(0).has_value());
  EXPECT_FALSE(tag_from_int(99).has_value());
  EXPECT_THROW(schema(static_cast<MessageTag>(99)), Error);
  EXPECT_EQ(tag_from_name("m7"), MessageTag::M7);
  EXPECT_EQ(tag_from_name("m3'"), MessageTag::M3Bank);
  EXPECT_FALSE(tag_from_name("m42").has_value());
}

TEST(Codec, AccessorErrors) {
  Rng rng = Rng::from_string("acc");
  WireMessage m = random_message(MessageTag::M17, rng);
  EXPECT_NO_THROW(m.u64("cost"));
  EXPECT_THROW(m.get("nope"), Error);
  EXPECT_THROW(m.digest("cost"), DecodeError);
}

TEST(Aead, KnownAnswerAes256Gcm) {
  // AES-256-GCM, zero key and IV, one zero block.
  AeadKey key{};
  AeadNonce iv{};
  Bytes sealed = aead_seal(key, iv, {}, Bytes(16, 0));
  EXPECT_EQ(to_hex(sealed), "cea7403d4d606b6e074ec5d3baf39d18d0d1c8a799996bf0265b98b5d48ab919");
  EXPECT_EQ(to_hex(aead_seal(key, iv, {}, {})), "530f8afbc74536b9a963b4f1c4cb738b");
}

TEST(Envelope, RoundTrip) {
  Rng rng = Rng::from_string("env");
  GroupKey k = GroupKey::random(7, rng);
  for (std::size_t len : {0u, 1u, 73u, 1000u}) {
    Bytes p = rng.bytes(len);
    GroupKeyEnvelope env = seal_group(k, p, rng);
    EXPECT_EQ(env.to_bytes().size(), len + kEnvelopeOverhead);
    EXPECT_EQ(open_group(k, GroupKeyEnvelope::from_bytes(env.to_bytes())), p);
  }
}

TEST(Envelope, EveryBitFlipFails) {
  Rng rng = Rng::from_string("env-flip");
  GroupKey k = GroupKey::random(1, rng);
  Bytes wire = seal_group(k, rng.bytes(40), rng).to_bytes();
  for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
    Bytes t = wire;
    t[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      open_group(k, GroupKeyEnvelope::from_bytes(t));
      FAIL() << "bit " << bit;
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::EnvelopeAuth);
    }
  }
}

TEST(Envelope, WrongKeyAndDecodeErrorsAreDistinct) {
  Rng rng = Rng::from_string("env-wrong");
  GroupKey k = GroupKey::random(1, rng);
  GroupKey other = GroupKey::random(1, rng);
  GroupKeyEnvelope env = seal_group(k, rng.bytes(10), rng);
  try {
    open_group(other, env);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EnvelopeAuth);
  }
  try {
    GroupKeyEnvelope::from_bytes(Bytes(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Decode);
  }
}

TEST(Hexdump, Format) {
  Bytes b{0xde, 0xad};
  EXPECT_EQ(hexdump_line("m5", "tx", "EV1", "FS0", b), "m5 tx EV1 FS0 2 dead");
}
