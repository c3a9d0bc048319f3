#include "swhid/describe.hpp"

#include <json.hpp>

#include <functional>
#include <map>

#include "internal/base64.hpp"

namespace swhid {

using nlohmann::json;

namespace {

// Thrown when a "@label" points at a node whose id is not computed yet.
struct Unresolved {};

using RefResolver =
    std::function<ObjectId(const std::string& label, ObjectType expected, const std::string& loc)>;

[[noreturn]] void schema_error(const std::string& loc, const std::string& message) {
  throw DescribeError(DescribeErrorKind::SchemaError, loc, message);
}

const json& member(const json& obj, const std::string& key, const std::string& loc) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(loc, "missing field \"" + key + "\"");
  return *it;
}

std::string get_string(const json& obj, const std::string& key, const std::string& loc) {
  const json& v = member(obj, key, loc);
  if (!v.is_string()) schema_error(loc + "/" + key, "expected a string");
  return v.get<std::string>();
}

// Text field `key`, or its base64 twin `key_b64` for non-UTF-8 payloads.
std::optional<Bytes> get_bytes_opt(const json& obj, const std::string& key, const std::string& loc) {
  bool plain = obj.contains(key) && !obj[key].is_null();
  bool encoded = obj.contains(key + "_b64") && !obj[key + "_b64"].is_null();
  if (plain && encoded) schema_error(loc, "both \"" + key + "\" and \"" + key + "_b64\" given");
  if (plain) return get_string(obj, key, loc);
  if (encoded) {
    auto decoded = internal::base64_decode(get_string(obj, key + "_b64", loc));
    if (!decoded) schema_error(loc + "/" + key + "_b64", "invalid base64");
    return decoded;
  }
  return std::nullopt;
}

Bytes get_bytes(const json& obj, const std::string& key, const std::string& loc) {
  auto v = get_bytes_opt(obj, key, loc);
  if (!v) schema_error(loc, "missing field \"" + key + "\" (or \"" + key + "_b64\")");
  return *v;
}

ObjectId get_id(const json& value, ObjectType expected, const std::string& loc,
                const RefResolver& resolve) {
  if (!value.is_string()) schema_error(loc, "expected an object id string");
  auto text = value.get<std::string>();
  if (text.starts_with("@")) return resolve(text.substr(1), expected, loc);
  auto id = ObjectId::from_hex(text);
  if (!id) schema_error(loc, "\"" + text + "\" is not a 40-digit hex object id");
  return *id;
}

ObjectType get_object_type(const json& obj, const std::string& key, const std::string& loc) {
  auto name = get_string(obj, key, loc);
  auto type = type_from_name(name);
  if (!type) schema_error(loc + "/" + key, "unknown object type \"" + name + "\"");
  return *type;
}

PersonStamp get_person(const json& obj, const std::string& role, const std::string& loc) {
  PersonStamp stamp;
  stamp.raw_person = get_bytes(obj, role, loc);
  std::string date_loc = loc + "/" + role + "_date";
  const json& date = member(obj, role + "_date", loc);
  if (!date.is_object()) schema_error(date_loc, "expected {seconds, offset}");
  const json& seconds = member(date, "seconds", date_loc);
  if (!seconds.is_number_integer()) schema_error(date_loc + "/seconds", "expected an integer");
  stamp.seconds = seconds.get<std::int64_t>();
  stamp.offset = get_string(date, "offset", date_loc);
  if (stamp.offset.size() != 5 || (stamp.offset[0] != '+' && stamp.offset[0] != '-') ||
      stamp.offset.find_first_not_of("0123456789", 1) != std::string::npos)
    schema_error(date_loc + "/offset", "offset must look like +HHMM or -HHMM");
  if (stamp.raw_person.find('\n') != Bytes::npos)
    schema_error(loc + "/" + role, "person contains a newline");
  return stamp;
}

Revision build_revision(const json& obj, const std::string& loc, const RefResolver& resolve) {
  Revision rev;
  rev.tree = get_id(member(obj, "tree", loc), ObjectType::directory, loc + "/tree", resolve);
  if (obj.contains("parents")) {
    const json& parents = obj["parents"];
    if (!parents.is_array()) schema_error(loc + "/parents", "expected a list");
    for (std::size_t i = 0; i < parents.size(); ++i)
      rev.parents.push_back(get_id(parents[i], ObjectType::revision,
                                   loc + "/parents/" + std::to_string(i), resolve));
  }
  rev.author = get_person(obj, "author", loc);
  rev.committer = get_person(obj, "committer", loc);
  if (obj.contains("extra_headers")) {
    const json& headers = obj["extra_headers"];
    std::string hloc = loc + "/extra_headers";
    if (!headers.is_array()) schema_error(hloc, "expected a list of [key, value] pairs");
    for (std::size_t i = 0; i < headers.size(); ++i) {
      const json& pair = headers[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
        schema_error(hloc + "/" + std::to_string(i), "expected a [key, value] pair of strings");
      auto key = pair[0].get<std::string>();
      if (key.empty() || key.find_first_of(" \n") != std::string::npos)
        schema_error(hloc + "/" + std::to_string(i) + "/0", "header key must not contain space or newline");
      rev.extra_headers.emplace_back(key, pair[1].get<std::string>());
    }
  }
  rev.message = get_bytes(obj, "message", loc);
  return rev;
}

Release build_release(const json& obj, const std::string& loc, const RefResolver& resolve) {
  Release rel;
  rel.target_type = get_object_type(obj, "target_type", loc);
  rel.target = get_id(member(obj, "target", loc), rel.target_type, loc + "/target", resolve);
  rel.name = get_bytes(obj, "name", loc);
  if (rel.name.empty() || rel.name.find_first_of(std::string_view("\n\0", 2)) != Bytes::npos)
    schema_error(loc + "/name", "release name must be non-empty without newline or NUL");
  if (get_bytes_opt(obj, "tagger", loc)) rel.tagger = get_person(obj, "tagger", loc);
  rel.message = get_bytes(obj, "message", loc);
  return rel;
}

Snapshot build_snapshot(const json& obj, const std::string& loc, const RefResolver& resolve) {
  Snapshot snp;
  const json& branches = member(obj, "branches", loc);
  if (!branches.is_object()) schema_error(loc + "/branches", "expected an object of branches");
  for (const auto& [name, value] : branches.items()) {
    std::string bloc = loc + "/branches/" + name;
    if (name.empty() || name.find('\0') != std::string::npos)
      schema_error(bloc, "branch name must be non-empty without NUL");
    if (value.is_null()) {
      snp.branches.emplace(name, BranchTarget::dangling());
      continue;
    }
    if (!value.is_object()) schema_error(bloc, "expected {target_type, target} or null");
    auto kind = get_string(value, "target_type", bloc);
    if (kind == "alias") {
      auto target = get_string(value, "target", bloc);
      if (target.empty() || target.find('\0') != std::string::npos)
        schema_error(bloc + "/target", "alias target must be a branch name");
      snp.branches.emplace(name, BranchTarget::alias(target));
      continue;
    }
    auto type = type_from_name(kind);
    if (!type) schema_error(bloc + "/target_type", "unknown branch target type \"" + kind + "\"");
    snp.branches.emplace(name, BranchTarget::object(
                                   *type, get_id(member(value, "target", bloc), *type,
                                                 bloc + "/target", resolve)));
  }
  return snp;
}

DagNode build_node(const json& obj, const std::string& loc, const RefResolver& resolve) {
  if (!obj.is_object()) schema_error(loc, "expected an object");
  auto type = get_string(obj, "type", loc);
  if (type == "revision") return build_revision(obj, loc, resolve);
  if (type == "release") return build_release(obj, loc, resolve);
  if (type == "snapshot") return build_snapshot(obj, loc, resolve);
  schema_error(loc + "/type", "type must be revision, release or snapshot, got \"" + type + "\"");
}

}  // namespace

DescribeError::DescribeError(DescribeErrorKind kind, std::string location,
                             const std::string& message)
    : Error((location.empty() ? std::string("(document)") : location) + ": " + message),
      kind_(kind),
      location_(std::move(location)) {}

std::vector<DescribedNode> describe_nodes(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos)
      schema_error("", "empty document");
    schema_error("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) schema_error("", "top level must be a list of node descriptions");

  const std::size_t n = doc.size();
  std::vector<std::optional<std::string>> labels(n);
  std::map<std::string, std::size_t> by_label;
  for (std::size_t i = 0; i < n; ++i) {
    std::string loc = "/" + std::to_string(i);
    if (doc[i].is_object() && doc[i].contains("label")) {
      auto label = get_string(doc[i], "label", loc);
      if (!by_label.emplace(label, i).second)
        schema_error(loc + "/label", "duplicate label \"" + label + "\"");
      labels[i] = label;
    }
  }

  std::vector<std::optional<DescribedNode>> done(n);
  auto lookup = [&](const std::string& label, ObjectType expected, const std::string& loc,
                    bool placeholder) -> ObjectId {
    auto it = by_label.find(label);
    if (it == by_label.end())
      throw DescribeError(DescribeErrorKind::UnknownReference, loc,
                          "no node labelled \"" + label + "\" in this file");
    auto actual = get_string(doc[it->second], "type", "/" + std::to_string(it->second));
    if (actual != type_name(expected))
      schema_error(loc, "\"@" + label + "\" is a " + actual + ", expected a " +
                            std::string(type_name(expected)));
    if (placeholder) return ObjectId();
    if (!done[it->second]) throw Unresolved{};
    return done[it->second]->id.id;
  };

  // First pass checks the whole schema with placeholder ids for references.
  RefResolver schema_pass = [&](const std::string& label, ObjectType expected,
                                const std::string& loc) { return lookup(label, expected, loc, true); };
  for (std::size_t i = 0; i < n; ++i) build_node(doc[i], "/" + std::to_string(i), schema_pass);

  RefResolver resolve = [&](const std::string& label, ObjectType expected, const std::string& loc) {
    return lookup(label, expected, loc, false);
  };
  for (std::size_t remaining = n; remaining > 0;) {
    std::size_t progress = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      try {
        DagNode node = build_node(doc[i], "/" + std::to_string(i), resolve);
        CoreSwhid id = object_id_of(node);
        done[i] = DescribedNode{labels[i], std::move(node), id};
        ++progress;
      } catch (const Unresolved&) {
      }
    }
    if (progress == 0) {
      for (std::size_t i = 0; i < n; ++i)
        if (!done[i])
          throw DescribeError(DescribeErrorKind::UnknownReference, "/" + std::to_string(i),
                              "cyclic reference between described nodes");
    }
    remaining -= progress;
  }

  std::vector<DescribedNode> out;
  out.reserve(n);
  for (auto& d : done) out.push_back(std::move(*d));
  return out;
}

}  // namespace swhid
