#include "swhid/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "internal/base64.hpp"
#include "swhid/describe.hpp"
#include "swhid/ingest.hpp"
#include "swhid/merkle.hpp"
#include "swhid/resolve.hpp"
#include "swhid/syntax.hpp"

namespace swhid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kEndpointEnv = "SWHID_ARCHIVE_API";
constexpr const char* kResolverConfigEnv = "SWHID_RESOLVER_CONFIG";

struct IdentifyArgs {
  std::vector<std::string> paths;
  std::string type;
  std::vector<std::string> excludes;
  bool recursive = false;
  unsigned jobs = 1;
  std::string store;
  bool json = false;
};

struct ParseArgs {
  std::string text;
  bool permissive = false;
  bool json = false;
};

struct VerifyArgs {
  std::string id;
  std::string path;
  std::vector<std::string> excludes;
  std::string store;
  unsigned jobs = 1;
  bool json = false;
};

struct ResolveArgs {
  std::string id;
  std::string resolver = "archive-web";
  std::string resolver_config;
  bool check = false;
  std::string fetch;
  std::string endpoint;
  int retries = 2;
  bool json = false;
};

struct ExtractArgs {
  std::string id;
  std::string file;
  bool no_verify = false;
  bool json = false;
};

struct DescribeArgs {
  std::string file;
  std::string store;
  bool json = false;
};

int status_for(const IngestError& e) {
  switch (e.kind()) {
    case IngestErrorKind::TypeMismatch: return kMismatch;
    case IngestErrorKind::RangeOutOfBounds: return kUsage;
    default: return kIoFailure;
  }
}

int status_for(const ResolveError& e) {
  switch (e.kind()) {
    case ResolveErrorKind::IntegrityMismatch:
    case ResolveErrorKind::TypeContradiction: return kMismatch;
    case ResolveErrorKind::BadEndpoint:
    case ResolveErrorKind::WrongObjectType: return kUsage;
    default: return kIoFailure;
  }
}

std::string display_path(const std::string& given, const fs::path& relative) {
  if (relative.empty()) return given;
  fs::path p(given);
  return (p / relative).string();
}

// Parses an identifier argument; prints diagnostics and returns nullopt on error.
std::optional<QualifiedSwhid> parse_arg(const std::string& text, std::ostream& err,
                                        bool permissive = false) {
  auto diags = validate(text, {permissive});
  for (const auto& d : diags) err << describe(d) << "\n";
  if (has_errors(diags)) return std::nullopt;
  return parse(text, {permissive});
}

void write_file_atomically(const fs::path& target, std::string_view data) {
  fs::path tmp = target;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IngestError(IngestErrorKind::Unreadable, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

int cmd_identify(const IdentifyArgs& args, std::ostream& out, std::ostream& err) {
  IngestOptions options{args.excludes, args.jobs};
  json records = json::array();
  ObjectStore merged;
  int status = kSuccess;
  for (const auto& path : args.paths) {
    try {
      if (!args.type.empty()) {
        std::error_code ec;
        auto st = fs::symlink_status(path, ec);
        if (st.type() == fs::file_type::not_found)
          throw IngestError(IngestErrorKind::NotFound, "no such file or directory: " + path);
        bool is_dir = st.type() == fs::file_type::directory;
        if (is_dir != (args.type == "dir")) {
          err << "swhid: --type " << args.type << " contradicts " << path
              << (is_dir ? " (a directory)" : " (not a directory)") << "\n";
          return kUsage;
        }
      }
      auto result = ingest_path(path, options);
      if (args.recursive) {
        for (const auto& node : result.nodes) {
          std::string shown = display_path(path, node.relative);
          records.push_back({{"swhid", format(node.id)}, {"path", shown}});
          if (!args.json) out << format(node.id) << '\t' << shown << '\n';
        }
      } else {
        records.push_back({{"swhid", format(result.root)}, {"path", path}});
        if (!args.json) out << format(result.root) << '\t' << path << '\n';
      }
      if (!args.store.empty()) merged.merge(result.store);
    } catch (const IngestError& e) {
      err << "swhid: " << e.what() << "\n";
      status = std::max(status, status_for(e));
    }
  }
  if (args.json) out << records.dump(2) << '\n';
  if (!args.store.empty()) {
    try {
      merged.save(args.store);
    } catch (const std::exception& e) {
      err << "swhid: cannot write store: " << e.what() << "\n";
      return kIoFailure;
    }
  }
  return status;
}

int cmd_parse(const ParseArgs& args, std::ostream& out, std::ostream& err) {
  auto diags = validate(args.text, {args.permissive});
  if (has_errors(diags)) {
    if (args.json) {
      json list = json::array();
      for (const auto& d : diags)
        list.push_back({{"offset", d.byte_offset},
                        {"kind", to_string(d.kind)},
                        {"severity", d.severity == Severity::error ? "error" : "warning"},
                        {"message", d.message}});
      out << json{{"valid", false}, {"diagnostics", list}}.dump(2) << '\n';
    }
    for (const auto& d : diags) err << describe(d) << "\n";
    return kUsage;
  }
  for (const auto& d : diags) err << describe(d) << "\n";
  auto id = parse(args.text, {args.permissive});
  std::string canonical = format(id);

  if (args.json) {
    json doc{{"valid", true},
             {"swhid", canonical},
             {"schema_version", id.core.version},
             {"object_type", type_name(id.core.type)},
             {"object_id", id.core.id.hex()},
             {"canonical", canonical == args.text}};
    if (id.origin) doc["origin"] = *id.origin;
    if (id.lines) {
      doc["lines"] = {{"start", id.lines->start}};
      if (id.lines->end) doc["lines"]["end"] = *id.lines->end;
    }
    out << doc.dump(2) << '\n';
    return kSuccess;
  }
  out << "schema_version: " << id.core.version << '\n';
  out << "object_type: " << type_name(id.core.type) << " (" << type_token(id.core.type) << ")\n";
  out << "object_id: " << id.core.id.hex() << '\n';
  if (id.origin) out << "origin: " << *id.origin << '\n';
  if (id.lines) {
    out << "lines: " << id.lines->start;
    if (id.lines->end) out << '-' << *id.lines->end;
    out << '\n';
  }
  if (canonical != args.text) out << "canonical: " << canonical << '\n';
  return kSuccess;
}

int cmd_validate(const ParseArgs& args, std::ostream& out, std::ostream&) {
  auto diags = validate(args.text, {args.permissive});
  if (args.json) {
    json list = json::array();
    for (const auto& d : diags)
      list.push_back({{"offset", d.byte_offset},
                      {"kind", to_string(d.kind)},
                      {"severity", d.severity == Severity::error ? "error" : "warning"},
                      {"message", d.message}});
    out << list.dump(2) << '\n';
  } else {
    for (const auto& d : diags) out << describe(d) << '\n';
  }
  return has_errors(diags) ? kUsage : kSuccess;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  auto id = parse_arg(args.id, err);
  if (!id) return kUsage;
  if (id->core.type != ObjectType::content && id->core.type != ObjectType::directory) {
    err << "swhid: " << type_name(id->core.type)
        << " type not verifiable from a filesystem path\n";
    return kUsage;
  }

  std::optional<ObjectStore> reference;
  VerifyOptions options;
  options.ingest = {args.excludes, args.jobs};
  if (!args.store.empty()) {
    try {
      reference = ObjectStore::load(args.store);
    } catch (const std::exception& e) {
      err << "swhid: cannot load store " << args.store << ": " << e.what() << "\n";
      return kIoFailure;
    }
    options.reference = &*reference;
  }

  VerificationReport report;
  try {
    report = verify_path(*id, args.path, options);
  } catch (const IngestError& e) {
    err << "swhid: " << e.what() << "\n";
    return status_for(e);
  }

  if (args.json) {
    json detail = json::array();
    for (const auto& d : report.detail) {
      json item{{"path", d.path.string()}, {"kind", to_string(d.kind)}};
      if (d.expected) item["expected"] = format(*d.expected);
      if (d.actual) item["actual"] = format(*d.actual);
      detail.push_back(item);
    }
    out << json{{"matched", report.matched},
                {"expected", format(report.expected)},
                {"actual", format(report.actual)},
                {"path", args.path},
                {"detail", detail}}
               .dump(2)
        << '\n';
  } else if (report.matched) {
    out << "match\t" << format(report.expected) << '\t' << args.path << '\n';
  } else {
    out << "mismatch\t" << args.path << '\n';
    out << "  expected\t" << format(report.expected) << '\n';
    out << "  actual\t" << format(report.actual) << '\n';
    for (const auto& d : report.detail) {
      out << "  " << to_string(d.kind) << '\t' << (d.path.empty() ? "." : d.path.string());
      if (d.expected) out << "\texpected " << format(*d.expected);
      if (d.actual) out << "\tactual " << format(*d.actual);
      out << '\n';
    }
  }
  return report.matched ? kSuccess : kMismatch;
}

int cmd_resolve(const ResolveArgs& args, std::ostream& out, std::ostream& err) {
  auto id = parse_arg(args.id, err);
  if (!id) return kUsage;
  auto kind = resolver_from_string(args.resolver);
  if (!kind) {
    err << "swhid: unknown resolver " << args.resolver << "\n";
    return kUsage;
  }

  ResolverConfig config;
  std::string config_file = args.resolver_config;
  if (config_file.empty())
    if (const char* env = std::getenv(kResolverConfigEnv)) config_file = env;
  if (!config_file.empty()) {
    try {
      config = ResolverConfig::load(config_file);
    } catch (const std::exception& e) {
      err << "swhid: " << e.what() << "\n";
      return kIoFailure;
    }
  }

  if (!args.check && args.fetch.empty()) {
    std::string url = resolver_url(*id, *kind, config);
    if (args.json)
      out << json{{"swhid", format(*id)}, {"resolver", args.resolver}, {"url", url}}.dump(2) << '\n';
    else
      out << url << '\n';
    return kSuccess;
  }

  ArchiveEndpoint endpoint;
  if (!args.endpoint.empty()) {
    endpoint.base_url = args.endpoint;
  } else if (const char* env = std::getenv(kEndpointEnv)) {
    endpoint.base_url = env;
  } else {
    endpoint.base_url = config.archive_api;
  }
  ClientOptions client_options;
  client_options.retries = args.retries;

  try {
    ArchiveClient client(endpoint, client_options);
    json doc{{"swhid", format(*id)}};
    if (args.check) {
      auto meta = client.resolve_metadata(id->core);
      doc["object_type"] = type_name(meta.swhid.type);
      doc["kind_confirmed"] = meta.object_kind_confirmed;
      doc["browse_url"] = meta.archive_browse_url;
      if (meta.raw_url) doc["raw_url"] = *meta.raw_url;
      if (!args.json) {
        out << "swhid: " << format(meta.swhid) << '\n';
        out << "object_type: " << type_name(meta.swhid.type) << " (confirmed)\n";
        out << "browse_url: " << meta.archive_browse_url << '\n';
        if (meta.raw_url) out << "raw_url: " << *meta.raw_url << '\n';
      }
    }
    if (!args.fetch.empty()) {
      if (id->core.type != ObjectType::content) {
        err << "swhid: --fetch needs a content (cnt) identifier\n";
        return kUsage;
      }
      Bytes data = client.fetch_content_verified(id->core);
      write_file_atomically(args.fetch, data);
      doc["fetched"] = {{"file", args.fetch}, {"bytes", data.size()}, {"verified", true}};
      if (!args.json)
        out << "fetched " << data.size() << " bytes to " << args.fetch << " (verified "
            << format(id->core) << ")\n";
    }
    if (args.json) out << doc.dump(2) << '\n';
  } catch (const ResolveError& e) {
    err << "swhid: " << e.what() << "\n";
    return status_for(e);
  } catch (const IngestError& e) {
    err << "swhid: " << e.what() << "\n";
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "swhid: " << e.what() << "\n";
    return kIoFailure;
  }
  return kSuccess;
}

int cmd_extract_lines(const ExtractArgs& args, std::ostream& out, std::ostream& err) {
  auto id = parse_arg(args.id, err);
  if (!id) return kUsage;
  if (!id->lines) {
    err << "swhid: identifier has no lines qualifier\n";
    return kUsage;
  }
  if (id->core.type != ObjectType::content) {
    err << "swhid: lines can only be extracted from a content (cnt) identifier\n";
    return kUsage;
  }
  try {
    Bytes data = read_file(args.file);
    if (!args.no_verify) {
      ObjectId actual = content_id(Content{data});
      if (actual != id->core.id) {
        err << "swhid: " << args.file << " does not match " << format(id->core) << " (actual "
            << actual.hex() << ")\n";
        return kMismatch;
      }
    }
    Bytes selected = extract_lines(data, *id->lines);
    if (args.json) {
      out << json{{"swhid", format(*id)},
                  {"start", id->lines->start},
                  {"end", id->lines->last()},
                  {"verified", !args.no_verify},
                  {"data_b64", internal::base64_encode(selected)}}
                 .dump(2)
          << '\n';
    } else {
      out.write(selected.data(), static_cast<std::streamsize>(selected.size()));
    }
  } catch (const IngestError& e) {
    err << "swhid: " << e.what() << "\n";
    return status_for(e);
  }
  return kSuccess;
}

int cmd_describe(const DescribeArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<DescribedNode> nodes;
  try {
    nodes = describe_nodes(read_file(args.file));
  } catch (const IngestError& e) {
    err << "swhid: " << e.what() << "\n";
    return kIoFailure;
  } catch (const DescribeError& e) {
    err << "swhid: " << args.file << ": " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    err << "swhid: " << args.file << ": " << e.what() << "\n";
    return kUsage;
  }
  json records = json::array();
  ObjectStore store;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string name = nodes[i].label.value_or("#" + std::to_string(i));
    records.push_back({{"swhid", format(nodes[i].id)}, {"node", name}});
    if (!args.json) out << format(nodes[i].id) << '\t' << name << '\n';
    if (!args.store.empty()) store.insert(nodes[i].node);
  }
  if (args.json) out << records.dump(2) << '\n';
  if (!args.store.empty()) {
    try {
      store.save(args.store);
    } catch (const std::exception& e) {
      err << "swhid: cannot write store: " << e.what() << "\n";
      return kIoFailure;
    }
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compute, parse, verify and resolve intrinsic identifiers for source code", "swhid"};
  app.require_subcommand(1);

  IdentifyArgs identify;
  auto* identify_cmd = app.add_subcommand("identify", "Print the identifier of files or directories");
  identify_cmd->add_option("paths", identify.paths, "Files or directories")->required();
  identify_cmd->add_option("--type", identify.type, "Require the path to be cnt or dir")
      ->check(CLI::IsMember({"cnt", "dir"}));
  identify_cmd->add_option("--exclude", identify.excludes, "Skip entries matching a glob");
  identify_cmd->add_flag("--recursive,-r", identify.recursive, "Print every node under a directory");
  identify_cmd->add_option("--jobs,-j", identify.jobs, "Parallel file hashing (0 = all cores)");
  identify_cmd->add_option("--store", identify.store, "Write manifests to an object store directory");
  identify_cmd->add_flag("--json", identify.json, "JSON output");

  ParseArgs parse_args;
  auto* parse_cmd = app.add_subcommand("parse", "Decompose an identifier into its parts");
  parse_cmd->add_option("identifier", parse_args.text)->required();
  parse_cmd->add_flag("--permissive", parse_args.permissive, "Unknown qualifiers are warnings");
  parse_cmd->add_flag("--json", parse_args.json, "JSON output");

  ParseArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "List all diagnostics for an identifier");
  validate_cmd->add_option("identifier", validate_args.text)->required();
  validate_cmd->add_flag("--permissive", validate_args.permissive, "Unknown qualifiers are warnings");
  validate_cmd->add_flag("--json", validate_args.json, "JSON output");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check a file or directory against an identifier");
  verify_cmd->add_option("identifier", verify.id)->required();
  verify_cmd->add_option("path", verify.path)->required();
  verify_cmd->add_option("--exclude", verify.excludes, "Skip entries matching a glob");
  verify_cmd->add_option("--store", verify.store, "Object store holding the expected tree");
  verify_cmd->add_option("--jobs,-j", verify.jobs, "Parallel file hashing (0 = all cores)");
  verify_cmd->add_flag("--json", verify.json, "JSON output");

  ResolveArgs resolve;
  auto* resolve_cmd = app.add_subcommand("resolve", "Print a resolver URL, or query the archive");
  resolve_cmd->add_option("identifier", resolve.id)->required();
  resolve_cmd->add_option("--resolver", resolve.resolver, "archive-web, archive-api, identifiers-org or n2t")
      ->check(CLI::IsMember({"archive-web", "archive-api", "identifiers-org", "n2t"}));
  resolve_cmd->add_option("--resolver-config", resolve.resolver_config, "JSON file with resolver URL prefixes");
  resolve_cmd->add_flag("--check", resolve.check, "Confirm existence and type with the archive API");
  resolve_cmd->add_option("--fetch", resolve.fetch, "Download a content object, verify it, write it here");
  resolve_cmd->add_option("--endpoint", resolve.endpoint, "Archive API base URL");
  resolve_cmd->add_option("--retries", resolve.retries, "Retries on transport errors")
      ->check(CLI::Range(0, 10));
  resolve_cmd->add_flag("--json", resolve.json, "JSON output");

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract-lines", "Print the lines named by a lines qualifier");
  extract_cmd->add_option("identifier", extract.id)->required();
  extract_cmd->add_option("file", extract.file)->required();
  extract_cmd->add_flag("--no-verify", extract.no_verify, "Skip checking the file against the identifier");
  extract_cmd->add_flag("--json", extract.json, "JSON output");

  DescribeArgs describe_args;
  auto* describe_cmd = app.add_subcommand("describe", "Identify revisions, releases and snapshots from a JSON file");
  describe_cmd->add_option("file", describe_args.file)->required();
  describe_cmd->add_option("--store", describe_args.store, "Write manifests to an object store directory");
  describe_cmd->add_flag("--json", describe_args.json, "JSON output");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  if (identify_cmd->parsed()) return cmd_identify(identify, out, err);
  if (parse_cmd->parsed()) return cmd_parse(parse_args, out, err);
  if (validate_cmd->parsed()) return cmd_validate(validate_args, out, err);
  if (verify_cmd->parsed()) return cmd_verify(verify, out, err);
  if (resolve_cmd->parsed()) return cmd_resolve(resolve, out, err);
  if (extract_cmd->parsed()) return cmd_extract_lines(extract, out, err);
  if (describe_cmd->parsed()) return cmd_describe(describe_args, out, err);
  return kUsage;
}

}  // namespace swhid::cli
