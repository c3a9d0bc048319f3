#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swhid/object_id.hpp"

namespace swhid {

inline constexpr unsigned kSchemaVersion = 1;

struct CoreSwhid {
  unsigned version = kSchemaVersion;
  ObjectType type = ObjectType::content;
  ObjectId id;

  bool operator==(const CoreSwhid&) const = default;
};

// 1-indexed, inclusive. `end` absent means a single line.
struct LineRange {
  std::uint64_t start = 1;
  std::optional<std::uint64_t> end;

  std::uint64_t last() const { return end.value_or(start); }
  bool operator==(const LineRange&) const = default;
};

struct QualifiedSwhid {
  CoreSwhid core;
  std::optional<std::string> origin;
  std::optional<LineRange> lines;

  bool operator==(const QualifiedSwhid&) const = default;
};

enum class DiagnosticKind {
  BadPrefix,
  UnsupportedVersion,
  BadType,
  BadHex,
  BadQualifier,
  BadLineRange,
  // warnings: input parses but is not in canonical form
  UppercaseHex,
  QualifierOrder,
  LeadingZeros,
  UnknownQualifier,
};

enum class Severity { error, warning };

struct ParseDiagnostic {
  std::size_t byte_offset = 0;
  DiagnosticKind kind = DiagnosticKind::BadPrefix;
  Severity severity = Severity::error;
  std::string message;
};

std::string_view to_string(DiagnosticKind kind);
// "offset 6: BadType: ..." form used by the CLI.
std::string describe(const ParseDiagnostic& diag);

class ParseError : public Error {
 public:
  explicit ParseError(ParseDiagnostic diag);
  const ParseDiagnostic& diagnostic() const { return diag_; }
  DiagnosticKind kind() const { return diag_.kind; }

 private:
  ParseDiagnostic diag_;
};

struct ParseOptions {
  // Unknown qualifier keys become warnings (and are dropped) instead of errors.
  bool permissive = false;
};

// Throws ParseError carrying the first error-severity diagnostic.
QualifiedSwhid parse(std::string_view text, const ParseOptions& options = {});

// Core identifiers only; any qualifier is rejected.
CoreSwhid parse_core(std::string_view text);

std::string format(const CoreSwhid& id);
std::string format(const QualifiedSwhid& id);

// All diagnostics, errors and non-canonical warnings, ordered by offset.
// Empty iff the text is a valid identifier already in canonical form.
std::vector<ParseDiagnostic> validate(std::string_view text,
                                      const ParseOptions& options = {});

bool has_errors(const std::vector<ParseDiagnostic>& diags);

// RFC 3986 URI check used for origin qualifiers; ';' is always rejected
// because it would be read as a qualifier separator.
bool is_valid_origin_url(std::string_view url);

}  // namespace swhid
