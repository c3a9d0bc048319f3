#include "swhid/syntax.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace swhid {

namespace {

constexpr std::string_view kPrefix = "swh:";

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Length of the UTF-8 sequence starting at s[i], or 0 if ill-formed.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char lead = byte(i);
  std::size_t len = 0;
  char32_t min = 0;
  char32_t cp = 0;
  if (lead >= 0xC2 && lead <= 0xDF) {
    len = 2, min = 0x80, cp = lead & 0x1F;
  } else if (lead >= 0xE0 && lead <= 0xEF) {
    len = 3, min = 0x800, cp = lead & 0x0F;
  } else if (lead >= 0xF0 && lead <= 0xF4) {
    len = 4, min = 0x10000, cp = lead & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xC0) != 0x80) return 0;
    cp = cp << 6 | (byte(i + k) & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

class Scanner {
 public:
  Scanner(std::string_view text, const ParseOptions& options)
      : text_(text), options_(options) {}

  std::optional<QualifiedSwhid> run() {
    std::size_t core_end = std::min(text_.find(';'), text_.size());
    scan_core(text_.substr(0, core_end));
    if (core_end < text_.size()) scan_qualifiers(core_end);
    if (has_errors(diags_)) return std::nullopt;
    return result_;
  }

  std::vector<ParseDiagnostic> take_diagnostics() {
    std::stable_sort(diags_.begin(), diags_.end(),
                     [](const auto& a, const auto& b) { return a.byte_offset < b.byte_offset; });
    return std::move(diags_);
  }

 private:
  void error(std::size_t offset, DiagnosticKind kind, std::string message) {
    diags_.push_back({offset, kind, Severity::error, std::move(message)});
  }
  void warning(std::size_t offset, DiagnosticKind kind, std::string message) {
    diags_.push_back({offset, kind, Severity::warning, std::move(message)});
  }

  void scan_core(std::string_view core) {
    if (!core.starts_with(kPrefix)) {
      error(0, DiagnosticKind::BadPrefix, "identifier must start with \"swh:\"");
      return;
    }

    std::size_t version_at = kPrefix.size();
    std::size_t version_end = core.find(':', version_at);
    std::string_view version = core.substr(version_at, version_end - version_at);
    if (version != "1") {
      error(version_at, DiagnosticKind::UnsupportedVersion,
            "unsupported schema version \"" + std::string(version) + "\" (only 1 is defined)");
    }
    if (version_end == std::string_view::npos) {
      error(core.size(), DiagnosticKind::BadType, "missing object type");
      return;
    }

    std::size_t type_at = version_end + 1;
    std::size_t type_end = core.find(':', type_at);
    std::string_view token = core.substr(type_at, type_end - type_at);
    auto type = type_from_token(token);
    if (!type) {
      error(type_at, DiagnosticKind::BadType,
            "unknown object type \"" + std::string(token) +
                "\" (expected snp, rel, rev, dir or cnt)");
    } else {
      result_.core.type = *type;
    }
    if (type_end == std::string_view::npos) {
      error(core.size(), DiagnosticKind::BadHex, "missing object id");
      return;
    }

    std::size_t id_at = type_end + 1;
    std::string_view hex = core.substr(id_at);
    auto bad = std::find_if_not(hex.begin(), hex.end(), is_hex);
    if (bad != hex.end()) {
      error(id_at + static_cast<std::size_t>(bad - hex.begin()), DiagnosticKind::BadHex,
            "object id contains a non-hex character");
      return;
    }
    if (hex.size() != ObjectId::kHexSize) {
      error(id_at, DiagnosticKind::BadHex,
            "object id must be 40 hex digits, got " + std::to_string(hex.size()));
      return;
    }
    auto upper = std::find_if(hex.begin(), hex.end(), [](char c) { return c >= 'A' && c <= 'F'; });
    if (upper != hex.end()) {
      warning(id_at + static_cast<std::size_t>(upper - hex.begin()), DiagnosticKind::UppercaseHex,
              "non-canonical uppercase hex; canonical form is lowercase");
    }
    result_.core.id = *ObjectId::from_hex(hex);
  }

  void scan_qualifiers(std::size_t pos) {
    bool saw_lines = false;
    while (pos < text_.size()) {
      std::size_t seg_at = pos + 1;  // skip ';'
      std::size_t seg_end = std::min(text_.find(';', seg_at), text_.size());
      scan_qualifier(seg_at, text_.substr(seg_at, seg_end - seg_at), saw_lines);
      pos = seg_end;
    }
  }

  void scan_qualifier(std::size_t at, std::string_view segment, bool& saw_lines) {
    std::size_t eq = segment.find('=');
    if (segment.empty() || eq == std::string_view::npos) {
      error(at, DiagnosticKind::BadQualifier,
            segment.empty() ? "empty qualifier" : "qualifier must be key=value");
      return;
    }
    std::string_view key = segment.substr(0, eq);
    std::string_view value = segment.substr(eq + 1);
    std::size_t value_at = at + eq + 1;

    if (key == "origin") {
      if (seen_origin_) {
        error(at, DiagnosticKind::BadQualifier, "duplicate origin qualifier");
        return;
      }
      seen_origin_ = true;
      if (saw_lines) {
        warning(at, DiagnosticKind::QualifierOrder,
                "non-canonical qualifier order; canonical form puts origin before lines");
      }
      if (!is_valid_origin_url(value)) {
        error(value_at, DiagnosticKind::BadQualifier, "origin is not an RFC 3986 URL");
        return;
      }
      result_.origin = std::string(value);
    } else if (key == "lines") {
      if (seen_lines_) {
        error(at, DiagnosticKind::BadQualifier, "duplicate lines qualifier");
        return;
      }
      seen_lines_ = true;
      saw_lines = true;
      scan_lines(value_at, value);
    } else if (options_.permissive) {
      warning(at, DiagnosticKind::UnknownQualifier,
              "unknown qualifier \"" + std::string(key) + "\" ignored");
    } else {
      error(at, DiagnosticKind::BadQualifier, "unknown qualifier \"" + std::string(key) + "\"");
    }
  }

  std::optional<std::uint64_t> scan_line_number(std::size_t at, std::string_view digits) {
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), is_digit)) {
      error(at, DiagnosticKind::BadQualifier, "line number must be a decimal integer");
      return std::nullopt;
    }
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc()) {
      error(at, DiagnosticKind::BadLineRange, "line number out of range");
      return std::nullopt;
    }
    if (n == 0) {
      error(at, DiagnosticKind::BadLineRange, "line numbers start at 1");
      return std::nullopt;
    }
    if (digits.size() > 1 && digits.front() == '0') {
      warning(at, DiagnosticKind::LeadingZeros, "non-canonical leading zeros in line number");
    }
    return n;
  }

  void scan_lines(std::size_t at, std::string_view value) {
    std::size_t dash = value.find('-');
    auto start = scan_line_number(at, value.substr(0, dash));
    std::optional<std::uint64_t> end;
    if (dash != std::string_view::npos) {
      end = scan_line_number(at + dash + 1, value.substr(dash + 1));
      if (!end) return;
    }
    if (!start) return;
    if (end && *end < *start) {
      error(at, DiagnosticKind::BadLineRange, "line range end precedes its start");
      return;
    }
    result_.lines = LineRange{*start, end};
  }

  std::string_view text_;
  const ParseOptions& options_;
  QualifiedSwhid result_;
  std::vector<ParseDiagnostic> diags_;
  bool seen_origin_ = false;
  bool seen_lines_ = false;
};

}  // namespace

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::BadPrefix: return "BadPrefix";
    case DiagnosticKind::UnsupportedVersion: return "UnsupportedVersion";
    case DiagnosticKind::BadType: return "BadType";
    case DiagnosticKind::BadHex: return "BadHex";
    case DiagnosticKind::BadQualifier: return "BadQualifier";
    case DiagnosticKind::BadLineRange: return "BadLineRange";
    case DiagnosticKind::UppercaseHex: return "UppercaseHex";
    case DiagnosticKind::QualifierOrder: return "QualifierOrder";
    case DiagnosticKind::LeadingZeros: return "LeadingZeros";
    case DiagnosticKind::UnknownQualifier: return "UnknownQualifier";
  }
  return "?";
}

std::string describe(const ParseDiagnostic& diag) {
  std::string out = diag.severity == Severity::error ? "error" : "warning";
  out += ": offset " + std::to_string(diag.byte_offset) + ": ";
  out += to_string(diag.kind);
  out += ": " + diag.message;
  return out;
}

ParseError::ParseError(ParseDiagnostic diag)
    : Error(describe(diag)), diag_(std::move(diag)) {}

QualifiedSwhid parse(std::string_view text, const ParseOptions& options) {
  Scanner scanner(text, options);
  auto value = scanner.run();
  if (value) return *value;
  for (auto& d : scanner.take_diagnostics())
    if (d.severity == Severity::error) throw ParseError(std::move(d));
  throw ParseError({0, DiagnosticKind::BadPrefix, Severity::error, "invalid identifier"});
}

CoreSwhid parse_core(std::string_view text) {
  auto q = parse(text);
  if (q.origin || q.lines) {
    throw ParseError({std::min(text.find(';'), text.size()), DiagnosticKind::BadQualifier,
                      Severity::error, "qualifiers are not allowed here"});
  }
  return q.core;
}

std::string format(const CoreSwhid& id) {
  std::string out(kPrefix);
  out += std::to_string(id.version);
  out += ':';
  out += type_token(id.type);
  out += ':';
  out += id.id.hex();
  return out;
}

std::string format(const QualifiedSwhid& id) {
  std::string out = format(id.core);
  if (id.origin) out += ";origin=" + *id.origin;
  if (id.lines) {
    out += ";lines=" + std::to_string(id.lines->start);
    if (id.lines->end) out += "-" + std::to_string(*id.lines->end);
  }
  return out;
}

std::vector<ParseDiagnostic> validate(std::string_view text, const ParseOptions& options) {
  Scanner scanner(text, options);
  scanner.run();
  return scanner.take_diagnostics();
}

bool has_errors(const std::vector<ParseDiagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const auto& d) { return d.severity == Severity::error; });
}

bool is_valid_origin_url(std::string_view url) {
  // scheme ":" hier-part [ "?" query ] [ "#" fragment ]
  std::size_t colon = url.find(':');
  if (colon == 0 || colon == std::string_view::npos || colon + 1 == url.size()) return false;
  if (!is_alpha(url[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = url[i];
    if (!is_alpha(c) && !is_digit(c) && c != '+' && c != '-' && c != '.') return false;
  }

  constexpr std::string_view kAllowed =
      "-._~"            // unreserved (besides alnum)
      "!$&'()*+,="      // sub-delims, minus ';'
      ":@/?[]";         // gen-delims allowed in the body ('#' handled below)
  bool in_fragment = false;
  for (std::size_t i = colon + 1; i < url.size();) {
    char c = url[i];
    auto byte = static_cast<unsigned char>(c);
    if (byte >= 0x80) {
      // IRI-style non-ASCII text must at least be well-formed UTF-8
      std::size_t len = utf8_sequence_length(url, i);
      if (len == 0) return false;
      i += len;
      continue;
    }
    if (c == '%') {
      if (i + 2 >= url.size() || !is_hex(url[i + 1]) || !is_hex(url[i + 2])) return false;
      i += 3;
      continue;
    }
    if (c == '#') {
      if (in_fragment) return false;
      in_fragment = true;
    } else if (!is_alpha(c) && !is_digit(c) && kAllowed.find(c) == std::string_view::npos) {
      return false;
    }
    ++i;
  }
  return true;
}

}  // namespace swhid
