#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "swhid/merkle.hpp"
#include "swhid/syntax.hpp"

namespace swhid {

// Deduplicating store of manifests keyed by (type, id). Safe for concurrent
// insert-if-absent; all writers for one key carry identical bytes.
class ObjectStore {
 public:
  ObjectStore() = default;
  ObjectStore(ObjectStore&& other) noexcept;
  ObjectStore& operator=(ObjectStore&& other) noexcept;
  ObjectStore(const ObjectStore&) = delete;
  ObjectStore& operator=(const ObjectStore&) = delete;

  // Hashes the manifest and stores it unless already present.
  // Returns the key and whether a new object was added.
  std::pair<CoreSwhid, bool> insert(Bytes manifest);
  std::pair<CoreSwhid, bool> insert(const DagNode& node);

  bool contains(const CoreSwhid& key) const;
  std::optional<Bytes> get(const CoreSwhid& key) const;
  // Number of insert calls seen for the key, including deduplicated ones.
  std::size_t insert_count(const CoreSwhid& key) const;

  std::size_t size() const;
  std::size_t count(ObjectType type) const;
  std::vector<CoreSwhid> keys() const;

  // Keys whose stored manifest does not re-hash to the key.
  std::vector<CoreSwhid> audit() const;

  // Merges another store into this one (dedup applies).
  void merge(const ObjectStore& other);

  // On-disk layout: <root>/objects/<2 hex>/<38 hex>, raw manifest bytes.
  // Existing object files are left untouched. Returns objects written.
  std::size_t save(const std::filesystem::path& root) const;
  static ObjectStore load(const std::filesystem::path& root);

 private:
  struct Entry {
    Bytes manifest;
    std::size_t inserts = 0;
  };
  struct KeyLess {
    bool operator()(const CoreSwhid& a, const CoreSwhid& b) const {
      return std::pair(a.type, a.id) < std::pair(b.type, b.id);
    }
  };

  mutable std::shared_mutex mutex_;
  std::map<CoreSwhid, Entry, KeyLess> objects_;
};

}  // namespace swhid
