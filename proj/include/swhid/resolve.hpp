#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "swhid/syntax.hpp"

namespace swhid {

enum class ResolverKind { archive_web, archive_api, identifiers_org, n2t };

std::string_view to_string(ResolverKind kind);
std::optional<ResolverKind> resolver_from_string(std::string_view name);

// URL prefixes for each resolver. Defaults mirror config/resolvers.json.
struct ResolverConfig {
  std::string archive_web = "https://archive.softwareheritage.org/";
  std::string archive_api = "https://archive.softwareheritage.org/api/1/";
  std::string identifiers_org = "https://identifiers.org/";
  std::string n2t = "https://n2t.net/";

  // Keys: archive_web, archive_api, identifiers_org, n2t. Missing keys keep
  // their defaults.
  static ResolverConfig from_json(std::string_view json_text);
  static ResolverConfig load(const std::filesystem::path& file);
};

// archive-web appends the full qualified identifier; the others use the
// core identifier only.
std::string resolver_url(const QualifiedSwhid& id, ResolverKind kind,
                         const ResolverConfig& config = {});

enum class ResolveErrorKind {
  NotFoundInArchive,
  TypeContradiction,
  TransportError,
  IntegrityMismatch,
  BadEndpoint,
  WrongObjectType,
};

class ResolveError : public Error {
 public:
  ResolveError(ResolveErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  ResolveErrorKind kind() const { return kind_; }

 private:
  ResolveErrorKind kind_;
};

// Archive REST API location. Path templates expand {swhid} and {id}.
struct ArchiveEndpoint {
  std::string base_url = "https://archive.softwareheritage.org/api/1/";
  std::string resolve_path = "resolve/{swhid}/";
  std::string raw_content_path = "content/sha1_git:{id}/raw/";
};

struct ClientOptions {
  // Retries after a transport failure. Integrity mismatches never retry.
  int retries = 2;
  std::chrono::milliseconds backoff{250};  // doubled on each retry
  std::chrono::seconds timeout{20};
};

struct ResolvedMetadata {
  CoreSwhid swhid;
  bool object_kind_confirmed = false;
  std::string archive_browse_url;
  std::optional<std::string> raw_url;
};

class ArchiveClient {
 public:
  explicit ArchiveClient(ArchiveEndpoint endpoint, ClientOptions options = {});

  const ArchiveEndpoint& endpoint() const { return endpoint_; }

  // Confirms the object exists and that the archive agrees on its type.
  ResolvedMetadata resolve_metadata(const CoreSwhid& id) const;

  // Downloads raw content bytes and returns them only if they hash to `id`.
  Bytes fetch_content_verified(const CoreSwhid& id) const;

  std::string resolve_url(const CoreSwhid& id) const;
  std::string raw_content_url(const CoreSwhid& id) const;

 private:
  struct Response {
    int status = 0;
    Bytes body;
  };
  Response get_with_retries(const std::string& path) const;

  ArchiveEndpoint endpoint_;
  ClientOptions options_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // path part of base_url, ends with '/'
};

ResolvedMetadata resolve_metadata(const CoreSwhid& id, const ArchiveEndpoint& endpoint);
Bytes fetch_content_verified(const CoreSwhid& id, const ArchiveEndpoint& endpoint);

}  // namespace swhid
