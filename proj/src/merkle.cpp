#include "swhid/merkle.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "swhid/sha1.hpp"

namespace swhid {

namespace {

Bytes with_header(std::string_view kind, std::string_view body) {
  Bytes out;
  auto len = std::to_string(body.size());
  out.reserve(kind.size() + 1 + len.size() + 1 + body.size());
  out.append(kind);
  out += ' ';
  out += len;
  out += '\0';
  out.append(body);
  return out;
}

ObjectId hash_with_header(std::string_view kind, std::string_view body) {
  auto len = std::to_string(body.size());
  Sha1 h;
  h.update(kind).update(" ").update(len).update(std::string_view("\0", 1)).update(body);
  return h.finish();
}

bool valid_offset(std::string_view offset) {
  return offset.size() == 5 && (offset[0] == '+' || offset[0] == '-') &&
         std::all_of(offset.begin() + 1, offset.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

Bytes person_line(std::string_view role, const PersonStamp& stamp) {
  if (stamp.raw_person.find('\n') != Bytes::npos)
    throw ModelError(ModelErrorKind::MalformedPerson,
                     std::string(role) + " contains a newline");
  if (!valid_offset(stamp.offset))
    throw ModelError(ModelErrorKind::MalformedPerson,
                     std::string(role) + " offset \"" + stamp.offset + "\" is not [+-]HHMM");
  Bytes line(role);
  line += ' ';
  line += stamp.raw_person;
  line += ' ';
  line += std::to_string(stamp.seconds);
  line += ' ';
  line += stamp.offset;
  line += '\n';
  return line;
}

// Header value continuation lines are indented by one space.
Bytes header_line(std::string_view key, std::string_view value) {
  if (key.empty() || key.find_first_of(std::string_view(" \n\0", 3)) != std::string_view::npos)
    throw ModelError(ModelErrorKind::MalformedHeader,
                     "extra header key must be non-empty without space, newline or NUL");
  Bytes line(key);
  line += ' ';
  for (char c : value) {
    line += c;
    if (c == '\n') line += ' ';
  }
  line += '\n';
  return line;
}

std::string_view release_target_token(ObjectType type) {
  switch (type) {
    case ObjectType::content: return "blob";
    case ObjectType::directory: return "tree";
    case ObjectType::revision: return "commit";
    case ObjectType::release: return "tag";
    case ObjectType::snapshot: return "refs";
  }
  return {};
}

Bytes directory_body(const Directory& dir) {
  struct Keyed {
    Bytes key;
    const DirectoryEntry* entry;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(dir.entries.size());
  std::set<std::string_view> names;
  for (const auto& e : dir.entries) {
    if (e.name.empty() || e.name.find_first_of(std::string_view("/\0", 2)) != Bytes::npos)
      throw ModelError(ModelErrorKind::InvalidName,
                       "directory entry name must be non-empty without '/' or NUL");
    if (!names.insert(e.name).second)
      throw ModelError(ModelErrorKind::DuplicateName, "duplicate directory entry \"" + e.name + "\"");
    Bytes key = e.name;
    if (e.permission == EntryPermission::directory) key += '/';
    keyed.push_back({std::move(key), &e});
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const Keyed& a, const Keyed& b) { return a.key < b.key; });

  Bytes body;
  for (const auto& k : keyed) {
    body += mode_token(k.entry->permission);
    body += ' ';
    body += k.entry->name;
    body += '\0';
    body += k.entry->target.raw();
  }
  return body;
}

Bytes revision_body(const Revision& rev) {
  Bytes body = "tree " + rev.tree.hex() + "\n";
  for (const auto& p : rev.parents) body += "parent " + p.hex() + "\n";
  body += person_line("author", rev.author);
  body += person_line("committer", rev.committer);
  for (const auto& [key, value] : rev.extra_headers) body += header_line(key, value);
  body += '\n';
  body += rev.message;
  return body;
}

Bytes release_body(const Release& rel) {
  if (rel.name.empty() || rel.name.find_first_of(std::string_view("\n\0", 2)) != Bytes::npos)
    throw ModelError(ModelErrorKind::MalformedName,
                     "release name must be non-empty without newline or NUL");
  Bytes body = "object " + rel.target.hex() + "\n";
  body += "type ";
  body += release_target_token(rel.target_type);
  body += "\ntag " + rel.name + "\n";
  if (rel.tagger) body += person_line("tagger", *rel.tagger);
  body += '\n';
  body += rel.message;
  return body;
}

Bytes snapshot_body(const Snapshot& snp) {
  // std::map orders std::string keys bytewise (char_traits compares unsigned)
  Bytes body;
  for (const auto& [name, target] : snp.branches) {
    if (name.empty() || name.find('\0') != Bytes::npos)
      throw ModelError(ModelErrorKind::InvalidBranchName,
                       "branch name must be non-empty without NUL");
    std::string_view payload;
    if (target.kind() == BranchKind::alias) {
      payload = target.alias_name();
    } else if (target.target()) {
      payload = target.target()->raw();
    }
    body += branch_kind_token(target.kind());
    body += ' ';
    body += name;
    body += '\0';
    body += std::to_string(payload.size());
    body += ':';
    body += payload;
  }
  return body;
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::string_view mode_token(EntryPermission perm) {
  switch (perm) {
    case EntryPermission::regular_file: return "100644";
    case EntryPermission::executable_file: return "100755";
    case EntryPermission::symlink: return "120000";
    case EntryPermission::directory: return "40000";
    case EntryPermission::nested_revision: return "160000";
  }
  return {};
}

std::optional<EntryPermission> permission_from_mode(std::string_view mode) {
  for (auto perm : {EntryPermission::regular_file, EntryPermission::executable_file,
                    EntryPermission::symlink, EntryPermission::directory,
                    EntryPermission::nested_revision}) {
    if (mode_token(perm) == mode) return perm;
  }
  return std::nullopt;
}

ObjectType target_type(EntryPermission perm) {
  switch (perm) {
    case EntryPermission::directory: return ObjectType::directory;
    case EntryPermission::nested_revision: return ObjectType::revision;
    default: return ObjectType::content;
  }
}

std::string_view branch_kind_token(BranchKind kind) {
  switch (kind) {
    case BranchKind::content: return "content";
    case BranchKind::directory: return "directory";
    case BranchKind::revision: return "revision";
    case BranchKind::release: return "release";
    case BranchKind::snapshot: return "snapshot";
    case BranchKind::alias: return "alias";
    case BranchKind::dangling: return "dangling";
  }
  return {};
}

std::optional<BranchKind> branch_kind_from_token(std::string_view token) {
  for (auto kind : {BranchKind::content, BranchKind::directory, BranchKind::revision,
                    BranchKind::release, BranchKind::snapshot, BranchKind::alias,
                    BranchKind::dangling}) {
    if (branch_kind_token(kind) == token) return kind;
  }
  return std::nullopt;
}

BranchTarget BranchTarget::object(ObjectType type, const ObjectId& id) {
  BranchTarget t;
  switch (type) {
    case ObjectType::content: t.kind_ = BranchKind::content; break;
    case ObjectType::directory: t.kind_ = BranchKind::directory; break;
    case ObjectType::revision: t.kind_ = BranchKind::revision; break;
    case ObjectType::release: t.kind_ = BranchKind::release; break;
    case ObjectType::snapshot: t.kind_ = BranchKind::snapshot; break;
  }
  t.target_ = id;
  return t;
}

BranchTarget BranchTarget::alias(Bytes branch_name) {
  if (branch_name.empty() || branch_name.find('\0') != Bytes::npos)
    throw ModelError(ModelErrorKind::InvalidBranchName,
                     "alias target must be a non-empty branch name without NUL");
  BranchTarget t;
  t.kind_ = BranchKind::alias;
  t.alias_name_ = std::move(branch_name);
  return t;
}

BranchTarget BranchTarget::dangling() { return BranchTarget(); }

ObjectType node_type(const DagNode& node) {
  return std::visit(Overloaded{
                        [](const Content&) { return ObjectType::content; },
                        [](const Directory&) { return ObjectType::directory; },
                        [](const Revision&) { return ObjectType::revision; },
                        [](const Release&) { return ObjectType::release; },
                        [](const Snapshot&) { return ObjectType::snapshot; },
                    },
                    node);
}

std::string_view manifest_kind(ObjectType type) {
  switch (type) {
    case ObjectType::content: return "blob";
    case ObjectType::directory: return "tree";
    case ObjectType::revision: return "commit";
    case ObjectType::release: return "tag";
    case ObjectType::snapshot: return "snapshot";
  }
  return {};
}

Bytes content_manifest(const Content& content) { return with_header("blob", content.data); }
Bytes directory_manifest(const Directory& dir) { return with_header("tree", directory_body(dir)); }
Bytes revision_manifest(const Revision& rev) { return with_header("commit", revision_body(rev)); }
Bytes release_manifest(const Release& rel) { return with_header("tag", release_body(rel)); }
Bytes snapshot_manifest(const Snapshot& snp) { return with_header("snapshot", snapshot_body(snp)); }

Bytes manifest_of(const DagNode& node) {
  return std::visit(Overloaded{
                        [](const Content& n) { return content_manifest(n); },
                        [](const Directory& n) { return directory_manifest(n); },
                        [](const Revision& n) { return revision_manifest(n); },
                        [](const Release& n) { return release_manifest(n); },
                        [](const Snapshot& n) { return snapshot_manifest(n); },
                    },
                    node);
}

// Content is hashed without copying the data into a manifest.
ObjectId content_id(const Content& content) { return hash_with_header("blob", content.data); }
ObjectId directory_id(const Directory& dir) { return hash_with_header("tree", directory_body(dir)); }
ObjectId revision_id(const Revision& rev) { return hash_with_header("commit", revision_body(rev)); }
ObjectId release_id(const Release& rel) { return hash_with_header("tag", release_body(rel)); }
ObjectId snapshot_id(const Snapshot& snp) { return hash_with_header("snapshot", snapshot_body(snp)); }

CoreSwhid object_id_of(const DagNode& node) {
  ObjectId id = std::visit(Overloaded{
                               [](const Content& n) { return content_id(n); },
                               [](const Directory& n) { return directory_id(n); },
                               [](const Revision& n) { return revision_id(n); },
                               [](const Release& n) { return release_id(n); },
                               [](const Snapshot& n) { return snapshot_id(n); },
                           },
                           node);
  return {kSchemaVersion, node_type(node), id};
}

std::pair<ObjectType, std::string_view> split_manifest(std::string_view manifest) {
  std::size_t space = manifest.find(' ');
  std::size_t nul = manifest.find('\0');
  if (space == std::string_view::npos || nul == std::string_view::npos || nul < space)
    throw ModelError(ModelErrorKind::MalformedManifest, "manifest header is malformed");
  std::string_view kind = manifest.substr(0, space);
  std::string_view len_text = manifest.substr(space + 1, nul - space - 1);

  std::optional<ObjectType> type;
  for (auto t : kAllObjectTypes)
    if (manifest_kind(t) == kind) type = t;
  if (!type)
    throw ModelError(ModelErrorKind::MalformedManifest,
                     "unknown manifest kind \"" + std::string(kind) + "\"");

  std::size_t len = 0;
  auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
  if (ec != std::errc() || ptr != len_text.data() + len_text.size() || len_text.empty())
    throw ModelError(ModelErrorKind::MalformedManifest, "manifest length field is malformed");
  std::string_view body = manifest.substr(nul + 1);
  if (body.size() != len)
    throw ModelError(ModelErrorKind::MalformedManifest, "manifest length field does not match body");
  return {*type, body};
}

Directory parse_directory_manifest(std::string_view manifest) {
  auto [type, body] = split_manifest(manifest);
  if (type != ObjectType::directory)
    throw ModelError(ModelErrorKind::MalformedManifest, "not a directory manifest");
  Directory dir;
  while (!body.empty()) {
    std::size_t space = body.find(' ');
    std::size_t nul = body.find('\0');
    if (space == std::string_view::npos || nul == std::string_view::npos || nul < space ||
        nul + 1 + ObjectId::kSize > body.size())
      throw ModelError(ModelErrorKind::MalformedManifest, "truncated directory entry");
    auto perm = permission_from_mode(body.substr(0, space));
    if (!perm)
      throw ModelError(ModelErrorKind::MalformedManifest,
                       "unknown entry mode \"" + std::string(body.substr(0, space)) + "\"");
    dir.entries.push_back({Bytes(body.substr(space + 1, nul - space - 1)), *perm,
                           ObjectId::from_raw(body.substr(nul + 1, ObjectId::kSize))});
    body.remove_prefix(nul + 1 + ObjectId::kSize);
  }
  return dir;
}

}  // namespace swhid
