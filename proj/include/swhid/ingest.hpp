#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "swhid/merkle.hpp"
#include "swhid/object_store.hpp"
#include "swhid/syntax.hpp"

namespace swhid {

enum class IngestErrorKind {
  NotFound,
  Unreadable,
  UnsupportedNodeKind,
  TypeMismatch,
  RangeOutOfBounds,
};

class IngestError : public Error {
 public:
  IngestError(IngestErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  IngestErrorKind kind() const { return kind_; }

 private:
  IngestErrorKind kind_;
};

struct IngestOptions {
  // fnmatch(3) patterns, tested against each entry's name and its path
  // relative to the ingest root.
  std::vector<std::string> excludes;
  // Worker threads for file hashing; 0 picks hardware concurrency.
  unsigned jobs = 1;
};

struct IdentifiedPath {
  std::filesystem::path relative;  // "" for the root
  CoreSwhid id;
  EntryPermission permission = EntryPermission::regular_file;
};

struct IngestResult {
  CoreSwhid root;
  ObjectStore store;
  // Every node reached, children before parents; root last.
  std::vector<IdentifiedPath> nodes;
};

IngestResult ingest_path(const std::filesystem::path& path,
                         const IngestOptions& options = {});

enum class DivergenceKind { changed, added, removed };

struct Divergence {
  std::filesystem::path path;
  DivergenceKind kind = DivergenceKind::changed;
  std::optional<CoreSwhid> expected;
  std::optional<CoreSwhid> actual;
};

std::string_view to_string(DivergenceKind kind);

struct VerificationReport {
  CoreSwhid expected;
  CoreSwhid actual;
  bool matched = false;
  std::vector<Divergence> detail;
};

struct VerifyOptions {
  IngestOptions ingest;
  // Store holding the expected tree's manifests (e.g. saved by an earlier
  // identify run). Without it a directory mismatch is reported at the root.
  const ObjectStore* reference = nullptr;
  std::size_t max_divergences = 16;
};

// Recomputes the identifier of `path` and compares it with `expected`
// (qualifiers are ignored). Only content and directory ids are verifiable.
VerificationReport verify_path(const QualifiedSwhid& expected,
                               const std::filesystem::path& path,
                               const VerifyOptions& options = {});

// Lines start..end (1-indexed, inclusive) of LF-separated data.
Bytes extract_lines(std::string_view data, const LineRange& range);

Bytes read_file(const std::filesystem::path& path);

}  // namespace swhid
