#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace swhid {

// Raw byte sequence. Names, messages and manifests are bytes, not text.
using Bytes = std::string;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ObjectType { snapshot, release, revision, directory, content };

inline constexpr std::array<ObjectType, 5> kAllObjectTypes = {
    ObjectType::snapshot, ObjectType::release, ObjectType::revision,
    ObjectType::directory, ObjectType::content};

// Three-letter token used in identifiers: snp, rel, rev, dir, cnt.
std::string_view type_token(ObjectType type);
std::optional<ObjectType> type_from_token(std::string_view token);

// Long name: snapshot, release, revision, directory, content.
std::string_view type_name(ObjectType type);
std::optional<ObjectType> type_from_name(std::string_view name);

class ObjectId {
 public:
  static constexpr std::size_t kSize = 20;
  static constexpr std::size_t kHexSize = 2 * kSize;

  constexpr ObjectId() = default;
  explicit ObjectId(std::span<const std::uint8_t, kSize> raw);

  // Accepts exactly 40 hex digits of either case.
  static std::optional<ObjectId> from_hex(std::string_view hex);
  // Like from_hex, but throws Error on malformed input.
  static ObjectId parse_hex(std::string_view hex);
  static ObjectId from_raw(std::string_view raw);

  std::string hex() const;
  std::string_view raw() const {
    return {reinterpret_cast<const char*>(bytes_.data()), bytes_.size()};
  }
  const std::array<std::uint8_t, kSize>& bytes() const { return bytes_; }

  auto operator<=>(const ObjectId&) const = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

}  // namespace swhid
