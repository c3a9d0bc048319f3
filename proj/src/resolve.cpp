#include "swhid/resolve.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <thread>

#include "swhid/merkle.hpp"

namespace swhid {

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

std::string expand(std::string templ, const CoreSwhid& id) {
  replace_all(templ, "{swhid}", format(id));
  replace_all(templ, "{id}", id.id.hex());
  return templ;
}

}  // namespace

std::string_view to_string(ResolverKind kind) {
  switch (kind) {
    case ResolverKind::archive_web: return "archive-web";
    case ResolverKind::archive_api: return "archive-api";
    case ResolverKind::identifiers_org: return "identifiers-org";
    case ResolverKind::n2t: return "n2t";
  }
  return "?";
}

std::optional<ResolverKind> resolver_from_string(std::string_view name) {
  for (auto kind : {ResolverKind::archive_web, ResolverKind::archive_api,
                    ResolverKind::identifiers_org, ResolverKind::n2t}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

ResolverConfig ResolverConfig::from_json(std::string_view json_text) {
  ResolverConfig config;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("resolver config: ") + e.what());
  }
  if (!doc.is_object()) throw Error("resolver config: expected a JSON object");
  auto read = [&](const char* key, std::string& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_string()) throw Error(std::string("resolver config: ") + key + " must be a string");
    field = doc[key].get<std::string>();
  };
  read("archive_web", config.archive_web);
  read("archive_api", config.archive_api);
  read("identifiers_org", config.identifiers_org);
  read("n2t", config.n2t);
  return config;
}

ResolverConfig ResolverConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read resolver config " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string resolver_url(const QualifiedSwhid& id, ResolverKind kind, const ResolverConfig& config) {
  switch (kind) {
    case ResolverKind::archive_web: return config.archive_web + format(id);
    case ResolverKind::archive_api: return config.archive_api + "resolve/" + format(id.core) + "/";
    case ResolverKind::identifiers_org: return config.identifiers_org + format(id.core);
    case ResolverKind::n2t: return config.n2t + format(id.core);
  }
  return {};
}

ArchiveClient::ArchiveClient(ArchiveEndpoint endpoint, ClientOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  const std::string& base = endpoint_.base_url;
  std::size_t scheme_end = base.find("://");
  if (scheme_end == std::string::npos)
    throw ResolveError(ResolveErrorKind::BadEndpoint, "endpoint must be an http(s) URL: " + base);
  std::string scheme = base.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ResolveError(ResolveErrorKind::BadEndpoint, "unsupported endpoint scheme: " + scheme);
  std::size_t path_start = base.find('/', scheme_end + 3);
  origin_ = base.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "/" : base.substr(path_start);
  if (path_prefix_.back() != '/') path_prefix_ += '/';
  if (origin_.size() <= scheme_end + 3)
    throw ResolveError(ResolveErrorKind::BadEndpoint, "endpoint has no host: " + base);
}

std::string ArchiveClient::resolve_url(const CoreSwhid& id) const {
  return origin_ + path_prefix_ + expand(endpoint_.resolve_path, id);
}

std::string ArchiveClient::raw_content_url(const CoreSwhid& id) const {
  return origin_ + path_prefix_ + expand(endpoint_.raw_content_path, id);
}

ArchiveClient::Response ArchiveClient::get_with_retries(const std::string& path) const {
  std::string last_error;
  auto delay = options_.backoff;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    return {res->status, std::move(res->body)};
  }
  throw ResolveError(ResolveErrorKind::TransportError,
                     "GET " + origin_ + path + " failed: " + last_error);
}

ResolvedMetadata ArchiveClient::resolve_metadata(const CoreSwhid& id) const {
  std::string path = path_prefix_ + expand(endpoint_.resolve_path, id);
  auto res = get_with_retries(path);
  if (res.status == 404 || res.status == 400)
    throw ResolveError(ResolveErrorKind::NotFoundInArchive, format(id) + " is not in the archive");
  if (res.status != 200)
    throw ResolveError(ResolveErrorKind::TransportError,
                       "unexpected HTTP " + std::to_string(res.status) + " from " + origin_ + path);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res.body);
  } catch (const nlohmann::json::parse_error&) {
    throw ResolveError(ResolveErrorKind::TransportError, "malformed resolution response");
  }
  if (!doc.is_object() || !doc.contains("object_type") || !doc["object_type"].is_string())
    throw ResolveError(ResolveErrorKind::TransportError, "resolution response lacks object_type");

  auto reported = doc["object_type"].get<std::string>();
  auto type = type_from_name(reported);
  if (!type) type = type_from_token(reported);
  if (type != id.type)
    throw ResolveError(ResolveErrorKind::TypeContradiction,
                       "archive reports " + reported + " for " + format(id));
  if (doc.contains("object_id") && doc["object_id"].is_string() &&
      ObjectId::from_hex(doc["object_id"].get<std::string>()) != id.id)
    throw ResolveError(ResolveErrorKind::TypeContradiction,
                       "archive answered for a different object than " + format(id));

  ResolvedMetadata meta;
  meta.swhid = id;
  meta.object_kind_confirmed = true;
  if (doc.contains("browse_url") && doc["browse_url"].is_string())
    meta.archive_browse_url = doc["browse_url"].get<std::string>();
  else
    meta.archive_browse_url = resolver_url({id, {}, {}}, ResolverKind::archive_web);
  if (id.type == ObjectType::content) meta.raw_url = raw_content_url(id);
  return meta;
}

Bytes ArchiveClient::fetch_content_verified(const CoreSwhid& id) const {
  if (id.type != ObjectType::content)
    throw ResolveError(ResolveErrorKind::WrongObjectType,
                       "only content identifiers can be fetched as raw bytes");
  std::string path = path_prefix_ + expand(endpoint_.raw_content_path, id);
  auto res = get_with_retries(path);
  if (res.status == 404)
    throw ResolveError(ResolveErrorKind::NotFoundInArchive, format(id) + " is not in the archive");
  if (res.status != 200)
    throw ResolveError(ResolveErrorKind::TransportError,
                       "unexpected HTTP " + std::to_string(res.status) + " from " + origin_ + path);
  Content content{std::move(res.body)};
  ObjectId actual = content_id(content);
  if (actual != id.id)
    throw ResolveError(ResolveErrorKind::IntegrityMismatch,
                       "downloaded bytes hash to " + actual.hex() + ", expected " + id.id.hex());
  return std::move(content.data);
}

ResolvedMetadata resolve_metadata(const CoreSwhid& id, const ArchiveEndpoint& endpoint) {
  return ArchiveClient(endpoint).resolve_metadata(id);
}

Bytes fetch_content_verified(const CoreSwhid& id, const ArchiveEndpoint& endpoint) {
  return ArchiveClient(endpoint).fetch_content_verified(id);
}

}  // namespace swhid
