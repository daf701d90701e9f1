#include "evc/wire.hpp"

#include <map>

#include "evc/errors.hpp"
#include "evc/rng.hpp"

namespace evc {

namespace {

constexpr std::size_t kId = 32, kNonce = 32, kPid = 32, kMac = 32, kHash = 32, kPoint = 64, kPoint2 = 128,
                      kTs = 8, kTicket = 64, kScalar = 32, kCost = 8;

const std::map<MessageTag, std::vector<FieldSpec>>& schemas() {
  using T = MessageTag;
  static const std::map<T, std::vector<FieldSpec>> s = {
      {T::M1, {{"id_cspa", kId}, {"t1", kTs}}},
      {T::M2, {{"k_cspa_g1", kPoint}, {"k_cspa_g2", kPoint2}, {"t2", kTs}}},
      {T::M3, {{"id_ev", kId}, {"t3", kTs}}},
      {T::M4,
       {{"k_ev_g1", kPoint},
        {"k_ev_g2", kPoint2},
        {"d_ev", kScalar},
        {"count", 2},
        {"a_list", kScalar, true},
        {"k_list", kPoint2, true},
        {"t4", kTs}}},
      {T::M3Bank, {{"pid", kPid}, {"t3b", kTs}}},
      {T::M4Bank, {{"ticket", kTicket}, {"t4b", kTs}}},
      {T::M5, {{"n_ev", kNonce}, {"r_ev_p", kPoint}, {"t5", kTs}}},
      {T::M6, {{"n_cspa", kNonce}, {"r_cspa_p", kPoint}, {"id_cspa", kId}, {"t6", kTs}}},
      {T::M7, {{"id_ra", kId}, {"pid", kPid}, {"ticket", kTicket}, {"mac_ev", kMac}, {"t7", kTs}}},
      {T::M8, {{"mac_cspa", kMac}, {"masked_token", kHash}, {"t8", kTs}}},
      {T::M9, {{"token_hash", kHash}, {"pid", kPid}, {"sk", kHash}, {"t9", kTs}}},
      {T::M10, {{"pid", kPid}, {"n_rsu", kNonce}, {"t10", kTs}}},
      {T::M11, {{"n_rsu_plus_1", kNonce}, {"m_ev", kNonce}, {"t11", kTs}, {"rate", 1}}},
      {T::M12, {{"chain_head", kHash}, {"anchor", kHash}, {"t12", kTs}}},
      {T::M13, {{"flag", 1}, {"value", kHash}}},
      {T::M14, {{"value", kHash}}},
      {T::M15, {{"flag", 1}, {"preimage", kHash}, {"anchor", kHash}}},
      {T::M16, {{"anchor", kHash}, {"t16", kTs}}},
      {T::M17, {{"token_hash", kHash}, {"cost", kCost}, {"t17", kTs}}},
      {T::M18, {{"ticket", kTicket}, {"cost", kCost}, {"t18", kTs}}},
      {T::M19, {{"cost", kCost}, {"t19", kTs}}},
      {T::SegmentClose, {{"anchor", kHash}, {"t_close", kTs}}},
  };
  return s;
}

const std::map<MessageTag, std::string_view>& names() {
  using T = MessageTag;
  static const std::map<T, std::string_view> n = {
      {T::M1, "m1"},   {T::M2, "m2"},   {T::M3, "m3"},   {T::M4, "m4"},   {T::M5, "m5"},
      {T::M6, "m6"},   {T::M7, "m7"},   {T::M8, "m8"},   {T::M9, "m9"},   {T::M10, "m10"},
      {T::M11, "m11"}, {T::M12, "m12"}, {T::M13, "m13"}, {T::M14, "m14"}, {T::M15, "m15"},
      {T::M16, "m16"}, {T::M17, "m17"}, {T::M18, "m18"}, {T::M19, "m19"}, {T::M3Bank, "m3'"},
      {T::M4Bank, "m4'"}, {T::SegmentClose, "close"},
  };
  return n;
}

std::size_t repeat_count(const std::vector<WireField>& fields) {
  for (const auto& f : fields) {
    if (f.name == "count" && f.value.size() == 2) return (std::size_t{f.value[0]} << 8) | f.value[1];
  }
  return 0;
}

}  // namespace

std::string_view tag_name(MessageTag tag) { return names().at(tag); }

std::optional<MessageTag> tag_from_name(std::string_view name) {
  for (const auto& [t, n] : names()) {
    if (n == name) return t;
  }
  if (name == "m3b") return MessageTag::M3Bank;
  if (name == "m4b") return MessageTag::M4Bank;
  return std::nullopt;
}

std::optional<MessageTag> tag_from_int(int value) {
  if (value < 1 || value > static_cast<int>(MessageTag::SegmentClose)) return std::nullopt;
  return static_cast<MessageTag>(value);
}

const std::vector<MessageTag>& all_tags() {
  static const std::vector<MessageTag> v = [] {
    std::vector<MessageTag> out;
    for (const auto& [t, _] : schemas()) out.push_back(t);
    return out;
  }();
  return v;
}

const std::vector<FieldSpec>& schema(MessageTag tag) {
  auto it = schemas().find(tag);
  if (it == schemas().end()) throw Error(ErrorKind::Decode, "unknown message tag");
  return it->second;
}

std::optional<std::size_t> encoded_length(MessageTag tag) {
  std::size_t total = 0;
  for (const auto& f : schema(tag)) {
    if (f.repeated) return std::nullopt;
    total += f.width;
  }
  return total;
}

std::size_t m4_length(std::size_t pseudonyms) {
  std::size_t total = 0;
  for (const auto& f : schema(MessageTag::M4)) total += f.repeated ? f.width * pseudonyms : f.width;
  return total;
}

const Bytes& WireMessage::get(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return f.value;
  }
  throw Error(ErrorKind::Protocol, std::string(tag_name(tag)) + " has no field " + std::string(name));
}

Digest WireMessage::digest(std::string_view name) const {
  const Bytes& b = get(name);
  if (b.size() != kDigestSize) throw DecodeError(std::string(name), "expected 32 bytes");
  return to_digest(view(b));
}

std::uint64_t WireMessage::u64(std::string_view name) const {
  const Bytes& b = get(name);
  if (b.size() != 8) throw DecodeError(std::string(name), "expected 8 bytes");
  return get_u64(view(b));
}

std::uint8_t WireMessage::byte(std::string_view name) const {
  const Bytes& b = get(name);
  if (b.size() != 1) throw DecodeError(std::string(name), "expected 1 byte");
  return b[0];
}

WireMessage make_message(MessageTag tag, std::vector<WireField> fields) {
  const auto& spec = schema(tag);
  if (fields.size() != spec.size()) {
    throw DecodeError(fields.size() < spec.size() ? std::string(spec[fields.size()].name) : fields.back().name,
                      "field count does not match schema of " + std::string(tag_name(tag)));
  }
  const std::size_t items = repeat_count(fields);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (fields[i].name != spec[i].name) throw DecodeError(std::string(spec[i].name), "missing or out of order");
    std::size_t want = spec[i].repeated ? spec[i].width * items : spec[i].width;
    if (fields[i].value.size() != want) {
      throw DecodeError(std::string(spec[i].name),
                        "width " + std::to_string(fields[i].value.size()) + ", expected " + std::to_string(want));
    }
  }
  return {tag, std::move(fields)};
}

Bytes encode(const WireMessage& msg) {
  WireMessage checked = make_message(msg.tag, msg.fields);
  Bytes out;
  for (const auto& f : checked.fields) append(out, view(f.value));
  return out;
}

WireMessage decode(MessageTag tag, ByteView bytes) {
  const auto& spec = schema(tag);
  WireMessage msg{tag, {}};
  std::size_t pos = 0;
  std::size_t items = 0;
  for (const auto& f : spec) {
    std::size_t want = f.repeated ? f.width * items : f.width;
    if (bytes.size() - pos < want) {
      throw DecodeError(std::string(f.name), "truncated " + std::string(tag_name(tag)) + " (" +
                                                 std::to_string(bytes.size()) + " bytes)");
    }
    auto part = bytes.subspan(pos, want);
    msg.fields.push_back({std::string(f.name), Bytes(part.begin(), part.end())});
    if (f.name == "count") items = (std::size_t{part[0]} << 8) | part[1];
    pos += want;
  }
  if (pos != bytes.size()) {
    throw DecodeError(std::string(spec.back().name), std::to_string(bytes.size() - pos) + " trailing bytes in " +
                                                         std::string(tag_name(tag)));
  }
  return msg;
}

Bytes u64_field(std::uint64_t v) {
  Bytes b;
  put_u64(b, v);
  return b;
}

Bytes u8_field(std::uint8_t v) { return Bytes{v}; }

const std::vector<SizeRow>& reference_sizes() {
  using T = MessageTag;
  static const std::vector<SizeRow> rows = {
      {T::M5, 104, "32 + 64 + 8"},           {T::M6, 136, "32 + 64 + 32 + 8"},
      {T::M7, 170, "32 + 32 + 64 + 32 + 8"}, {T::M8, 72, "32 + 32 + 8"},
      {T::M9, 104, "32 + 32 + 32 + 8"},      {T::M10, 72, "32 + 32 + 8"},
      {T::M11, 73, "32 + 32 + 8 + 1"},       {T::M12, 72, "32 + 32 + 8"},
      {T::M13, 33, "1 + 32"},                {T::M14, 32, "32"},
      {T::M15, 65, "1 + 32 + 32"},           {T::M16, 40, "32 + 8"},
  };
  return rows;
}

GroupKey GroupKey::random(std::uint32_t id, Rng& rng) {
  GroupKey k;
  k.id = id;
  rng.fill(k.key);
  return k;
}

GroupKey GroupKey::from_digest(std::uint32_t id, const Digest& d) {
  GroupKey k;
  k.id = id;
  std::copy(d.begin(), d.end(), k.key.begin());
  return k;
}

namespace {

std::array<std::uint8_t, 4> be32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v)};
}

}  // namespace

Bytes GroupKeyEnvelope::to_bytes() const {
  Bytes out;
  append(out, view(be32(key_id)));
  append(out, view(nonce));
  append(out, view(ciphertext));
  return out;
}

GroupKeyEnvelope GroupKeyEnvelope::from_bytes(ByteView bytes) {
  if (bytes.size() < kEnvelopeOverhead) throw DecodeError("envelope", "shorter than nonce and tag");
  GroupKeyEnvelope env;
  env.key_id = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) | (std::uint32_t{bytes[2]} << 8) |
               bytes[3];
  std::copy_n(bytes.begin() + 4, kAeadNonceBytes, env.nonce.begin());
  env.ciphertext.assign(bytes.begin() + 4 + kAeadNonceBytes, bytes.end());
  return env;
}

GroupKeyEnvelope seal_group(const GroupKey& key, ByteView plaintext, Rng& rng) {
  GroupKeyEnvelope env;
  env.key_id = key.id;
  rng.fill(env.nonce);
  env.ciphertext = aead_seal(key.key, env.nonce, view(be32(key.id)), plaintext);
  return env;
}

Bytes open_group(const GroupKey& key, const GroupKeyEnvelope& env) {
  if (env.key_id != key.id) throw Error(ErrorKind::EnvelopeAuth, "envelope sealed under a different group key");
  auto pt = aead_open(key.key, env.nonce, view(be32(env.key_id)), view(env.ciphertext));
  if (!pt) throw Error(ErrorKind::EnvelopeAuth, "group envelope authentication failed");
  return *pt;
}

std::string hexdump_line(std::string_view tag, std::string_view dir, std::string_view src, std::string_view dst,
                         ByteView bytes) {
  std::string out;
  out.reserve(64 + bytes.size() * 2);
  out.append(tag).append(" ").append(dir).append(" ").append(src).append(" ").append(dst).append(" ");
  out.append(std::to_string(bytes.size())).append(" ").append(to_hex(bytes));
  return out;
}

}  // namespace evc
