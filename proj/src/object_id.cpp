#include "swhid/object_id.hpp"

#include <algorithm>

namespace swhid {

namespace {

struct TypeNames {
  ObjectType type;
  std::string_view token;
  std::string_view name;
};

constexpr std::array<TypeNames, 5> kTypeNames = {{
    {ObjectType::snapshot, "snp", "snapshot"},
    {ObjectType::release, "rel", "release"},
    {ObjectType::revision, "rev", "revision"},
    {ObjectType::directory, "dir", "directory"},
    {ObjectType::content, "cnt", "content"},
}};

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string_view type_token(ObjectType type) {
  for (const auto& t : kTypeNames)
    if (t.type == type) return t.token;
  return {};
}

std::optional<ObjectType> type_from_token(std::string_view token) {
  for (const auto& t : kTypeNames)
    if (t.token == token) return t.type;
  return std::nullopt;
}

std::string_view type_name(ObjectType type) {
  for (const auto& t : kTypeNames)
    if (t.type == type) return t.name;
  return {};
}

std::optional<ObjectType> type_from_name(std::string_view name) {
  for (const auto& t : kTypeNames)
    if (t.name == name) return t.type;
  return std::nullopt;
}

ObjectId::ObjectId(std::span<const std::uint8_t, kSize> raw) {
  std::copy(raw.begin(), raw.end(), bytes_.begin());
}

std::optional<ObjectId> ObjectId::from_hex(std::string_view hex) {
  if (hex.size() != kHexSize) return std::nullopt;
  ObjectId id;
  for (std::size_t i = 0; i < kSize; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    id.bytes_[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return id;
}

ObjectId ObjectId::parse_hex(std::string_view hex) {
  auto id = from_hex(hex);
  if (!id) throw Error("not a 40-digit hex object id: '" + std::string(hex) + "'");
  return *id;
}

ObjectId ObjectId::from_raw(std::string_view raw) {
  if (raw.size() != kSize)
    throw Error("raw object id must be 20 bytes, got " + std::to_string(raw.size()));
  ObjectId id;
  std::transform(raw.begin(), raw.end(), id.bytes_.begin(),
                 [](char c) { return static_cast<std::uint8_t>(c); });
  return id;
}

std::string ObjectId::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(kHexSize, '0');
  for (std::size_t i = 0; i < kSize; ++i) {
    out[2 * i] = kDigits[bytes_[i] >> 4];
    out[2 * i + 1] = kDigits[bytes_[i] & 0xf];
  }
  return out;
}

}  // namespace swhid
