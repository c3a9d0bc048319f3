#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "swhid/object_id.hpp"
#include "swhid/syntax.hpp"

namespace swhid {

enum class ModelErrorKind {
  DuplicateName,
  InvalidName,
  MalformedPerson,
  MalformedName,
  MalformedHeader,
  InvalidBranchName,
  MalformedManifest,
};

class ModelError : public Error {
 public:
  ModelError(ModelErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  ModelErrorKind kind() const { return kind_; }

 private:
  ModelErrorKind kind_;
};

struct Content {
  Bytes data;
};

enum class EntryPermission {
  regular_file,     // 100644
  executable_file,  // 100755
  symlink,          // 120000
  directory,        // 40000
  nested_revision,  // 160000
};

std::string_view mode_token(EntryPermission perm);
std::optional<EntryPermission> permission_from_mode(std::string_view mode);
// Object kind an entry with this permission points at.
ObjectType target_type(EntryPermission perm);

struct DirectoryEntry {
  Bytes name;
  EntryPermission permission = EntryPermission::regular_file;
  ObjectId target;
};

struct Directory {
  std::vector<DirectoryEntry> entries;  // any order
};

struct PersonStamp {
  Bytes raw_person;       // conventionally "Name <email>"
  std::int64_t seconds = 0;
  std::string offset = "+0000";  // kept verbatim, including "-0000"
};

struct Revision {
  ObjectId tree;
  std::vector<ObjectId> parents;
  PersonStamp author;
  PersonStamp committer;
  std::vector<std::pair<Bytes, Bytes>> extra_headers;
  Bytes message;
};

struct Release {
  ObjectId target;
  ObjectType target_type = ObjectType::revision;
  Bytes name;
  std::optional<PersonStamp> tagger;
  Bytes message;
};

enum class BranchKind {
  content,
  directory,
  revision,
  release,
  snapshot,
  alias,
  dangling,
};

std::string_view branch_kind_token(BranchKind kind);
std::optional<BranchKind> branch_kind_from_token(std::string_view token);

class BranchTarget {
 public:
  static BranchTarget object(ObjectType type, const ObjectId& id);
  static BranchTarget alias(Bytes branch_name);
  static BranchTarget dangling();

  BranchKind kind() const { return kind_; }
  // Set iff kind is one of the five object kinds.
  const std::optional<ObjectId>& target() const { return target_; }
  // Non-empty iff kind == alias.
  const Bytes& alias_name() const { return alias_name_; }

  bool operator==(const BranchTarget&) const = default;

 private:
  BranchTarget() = default;

  BranchKind kind_ = BranchKind::dangling;
  std::optional<ObjectId> target_;
  Bytes alias_name_;
};

struct Snapshot {
  std::map<Bytes, BranchTarget> branches;
};

using DagNode = std::variant<Content, Directory, Revision, Release, Snapshot>;

ObjectType node_type(const DagNode& node);

// Manifests: "<kind> SP <decimal body length> NUL <body>".
Bytes content_manifest(const Content& content);
Bytes directory_manifest(const Directory& dir);
Bytes revision_manifest(const Revision& rev);
Bytes release_manifest(const Release& rel);
Bytes snapshot_manifest(const Snapshot& snp);
Bytes manifest_of(const DagNode& node);

ObjectId content_id(const Content& content);
ObjectId directory_id(const Directory& dir);
ObjectId revision_id(const Revision& rev);
ObjectId release_id(const Release& rel);
ObjectId snapshot_id(const Snapshot& snp);
CoreSwhid object_id_of(const DagNode& node);

// Header kind for an object type: blob, tree, commit, tag, snapshot.
std::string_view manifest_kind(ObjectType type);

// Splits a manifest into its object type and body; checks the length field.
std::pair<ObjectType, std::string_view> split_manifest(std::string_view manifest);

// Inverse of directory_manifest, for diffing stored trees.
Directory parse_directory_manifest(std::string_view manifest);

}  // namespace swhid
