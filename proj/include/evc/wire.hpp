#pragma once

// Fixed-width codecs for the protocol messages. A message is its schema's fields
// concatenated in order; there is no header, length prefix or tag byte on the wire.
// m4 is the only variable-length message (it carries the pseudonym batch).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evc/aead.hpp"
#include "evc/bytes.hpp"

namespace evc {

class Rng;

enum class MessageTag : std::uint8_t {
  M1 = 1, M2, M3, M4, M5, M6, M7, M8, M9, M10, M11, M12, M13, M14, M15, M16, M17, M18, M19,
  M3Bank,        // m3': ticket request to the Bank
  M4Bank,        // m4': ticket reply
  SegmentClose,  // RSU -> CPs after termination, retires a chain
};

std::string_view tag_name(MessageTag tag);
std::optional<MessageTag> tag_from_name(std::string_view name);
std::optional<MessageTag> tag_from_int(int value);
const std::vector<MessageTag>& all_tags();

struct FieldSpec {
  std::string_view name;
  std::size_t width;            // bytes, or bytes per item for repeated fields
  bool repeated = false;        // item count comes from the preceding "count" field
};

const std::vector<FieldSpec>& schema(MessageTag tag);

/// Encoded length for fixed-width messages; nullopt for m4.
std::optional<std::size_t> encoded_length(MessageTag tag);
std::size_t m4_length(std::size_t pseudonyms);

struct WireField {
  std::string name;
  Bytes value;
  friend bool operator==(const WireField&, const WireField&) = default;
};

struct WireMessage {
  MessageTag tag{};
  std::vector<WireField> fields;

  const Bytes& get(std::string_view name) const;
  Digest digest(std::string_view name) const;
  std::uint64_t u64(std::string_view name) const;
  std::uint8_t byte(std::string_view name) const;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

/// Builds a message, checking names and widths against the schema.
WireMessage make_message(MessageTag tag, std::vector<WireField> fields);

Bytes encode(const WireMessage& msg);
WireMessage decode(MessageTag tag, ByteView bytes);

Bytes u64_field(std::uint64_t v);
Bytes u8_field(std::uint8_t v);
template <std::size_t N>
Bytes field(const std::array<std::uint8_t, N>& a) {
  return Bytes(a.begin(), a.end());
}

/// Table V reference row: plaintext length as printed and as summed from field widths.
struct SizeRow {
  MessageTag tag;
  std::size_t printed_bytes;
  std::string formula;
};
const std::vector<SizeRow>& reference_sizes();

// Symmetric group-key envelope (GK_RSU-CSPA, GK_RSUj-CP, GK_CPj, and session keys).
struct GroupKey {
  std::uint32_t id = 0;
  AeadKey key{};

  static GroupKey random(std::uint32_t id, Rng& rng);
  static GroupKey from_digest(std::uint32_t id, const Digest& d);
};

/// Wire form: key_id (4, big-endian) || nonce (12) || ciphertext || tag (16).
struct GroupKeyEnvelope {
  std::uint32_t key_id = 0;
  AeadNonce nonce{};
  Bytes ciphertext;  // includes the GCM tag

  Bytes to_bytes() const;
  static GroupKeyEnvelope from_bytes(ByteView bytes);
};

constexpr std::size_t kEnvelopeOverhead = 4 + kAeadNonceBytes + kAeadTagBytes;

GroupKeyEnvelope seal_group(const GroupKey& key, ByteView plaintext, Rng& rng);
/// Throws EnvelopeAuth on key-id mismatch or any modification.
Bytes open_group(const GroupKey& key, const GroupKeyEnvelope& env);

/// `tag dir src dst len hex`
std::string hexdump_line(std::string_view tag, std::string_view dir, std::string_view src, std::string_view dst,
                         ByteView bytes);

}  // namespace evc
