#include "swhid/object_store.hpp"

#include <fstream>
#include <sstream>

#include "swhid/sha1.hpp"

namespace swhid {

namespace fs = std::filesystem;

ObjectStore::ObjectStore(ObjectStore&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  objects_ = std::move(other.objects_);
}

ObjectStore& ObjectStore::operator=(ObjectStore&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    objects_ = std::move(other.objects_);
  }
  return *this;
}

std::pair<CoreSwhid, bool> ObjectStore::insert(Bytes manifest) {
  auto [type, body] = split_manifest(manifest);
  CoreSwhid key{kSchemaVersion, type, sha1(manifest)};
  std::unique_lock lock(mutex_);
  auto [it, added] = objects_.try_emplace(key);
  if (added) it->second.manifest = std::move(manifest);
  ++it->second.inserts;
  return {key, added};
}

std::pair<CoreSwhid, bool> ObjectStore::insert(const DagNode& node) {
  return insert(manifest_of(node));
}

bool ObjectStore::contains(const CoreSwhid& key) const {
  std::shared_lock lock(mutex_);
  return objects_.contains(key);
}

std::optional<Bytes> ObjectStore::get(const CoreSwhid& key) const {
  std::shared_lock lock(mutex_);
  auto it = objects_.find(key);
  if (it == objects_.end()) return std::nullopt;
  return it->second.manifest;
}

std::size_t ObjectStore::insert_count(const CoreSwhid& key) const {
  std::shared_lock lock(mutex_);
  auto it = objects_.find(key);
  return it == objects_.end() ? 0 : it->second.inserts;
}

std::size_t ObjectStore::size() const {
  std::shared_lock lock(mutex_);
  return objects_.size();
}

std::size_t ObjectStore::count(ObjectType type) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [key, entry] : objects_)
    if (key.type == type) ++n;
  return n;
}

std::vector<CoreSwhid> ObjectStore::keys() const {
  std::shared_lock lock(mutex_);
  std::vector<CoreSwhid> out;
  out.reserve(objects_.size());
  for (const auto& [key, entry] : objects_) out.push_back(key);
  return out;
}

std::vector<CoreSwhid> ObjectStore::audit() const {
  std::shared_lock lock(mutex_);
  std::vector<CoreSwhid> bad;
  for (const auto& [key, entry] : objects_) {
    bool ok = sha1(entry.manifest) == key.id;
    if (ok) {
      try {
        ok = split_manifest(entry.manifest).first == key.type;
      } catch (const ModelError&) {
        ok = false;
      }
    }
    if (!ok) bad.push_back(key);
  }
  return bad;
}

void ObjectStore::merge(const ObjectStore& other) {
  if (&other == this) return;
  std::scoped_lock lock(mutex_, other.mutex_);
  for (const auto& [key, entry] : other.objects_) {
    auto [it, added] = objects_.try_emplace(key, entry);
    if (!added) it->second.inserts += entry.inserts;
  }
}

std::size_t ObjectStore::save(const fs::path& root) const {
  std::shared_lock lock(mutex_);
  std::size_t written = 0;
  for (const auto& [key, entry] : objects_) {
    std::string hex = key.id.hex();
    fs::path dir = root / "objects" / hex.substr(0, 2);
    fs::path file = dir / hex.substr(2);
    if (fs::exists(file)) continue;
    fs::create_directories(dir);
    fs::path tmp = file;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(entry.manifest.data(), static_cast<std::streamsize>(entry.manifest.size()));
      if (!out) throw Error("cannot write object file " + tmp.string());
    }
    fs::rename(tmp, file);
    ++written;
  }
  return written;
}

ObjectStore ObjectStore::load(const fs::path& root) {
  ObjectStore store;
  fs::path objects = root / "objects";
  if (!fs::is_directory(objects)) return store;
  for (const auto& fan : fs::directory_iterator(objects)) {
    if (!fan.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(fan.path())) {
      if (!file.is_regular_file()) continue;
      std::string hex = fan.path().filename().string() + file.path().filename().string();
      auto expected = ObjectId::from_hex(hex);
      if (!expected) continue;  // stray temp files
      std::ifstream in(file.path(), std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      auto [key, added] = store.insert(buf.str());
      if (key.id != *expected)
        throw Error("object file " + file.path().string() + " does not hash to its name");
    }
  }
  return store;
}

}  // namespace swhid
