// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails. Network checks are skipped when the archive is not
// reachable or SWHID_OFFLINE is set.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "support/mock_archive.hpp"
#include "support/test_support.hpp"
#include "swhid/ingest.hpp"
#include "swhid/resolve.hpp"
#include "swhid/syntax.hpp"

using namespace swhid;
using namespace swhid::test;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances
constexpr double kGpl3MaxSeconds = 1.0;
constexpr double kOracleMaxSeconds = 30.0;
constexpr std::size_t kOracleRequired = 100;
constexpr int kRoundTrips = 1000;
constexpr int kMutationFiles = 50;
constexpr int kFetchAttempts = 25;
constexpr int kCorruptEvery = 5;

enum class Outcome { pass, fail, skip };

struct Result {
  Outcome outcome = Outcome::pass;
  std::string detail;
};

Result pass(std::string detail) { return {Outcome::pass, std::move(detail)}; }
Result fail(std::string detail) { return {Outcome::fail, std::move(detail)}; }
Result skip(std::string detail) { return {Outcome::skip, std::move(detail)}; }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Result gpl3_fixture() {
  auto start = Clock::now();
  auto r = run_cli({"identify", gpl3_path().string()});
  double elapsed = seconds_since(start);
  std::string want = "swh:1:cnt:" + std::string(kGpl3Id);
  std::string got = r.out.substr(0, r.out.find('\t'));
  if (r.status != 0 || got != want) return fail("got '" + got + "' exit " + std::to_string(r.status));
  if (elapsed >= kGpl3MaxSeconds) return fail("took " + fixed(elapsed) + " s");
  return pass(got + " in " + fixed(elapsed) + " s");
}

Result degenerate_fixtures() {
  TempDir dir;
  write_file(dir / "empty", "");
  fs::create_directories(dir / "emptydir");
  auto cnt = ingest_path(dir / "empty").root;
  auto tree = ingest_path(dir / "emptydir").root;
  bool ok = cnt.id.hex() == kEmptyContentId && cnt.type == ObjectType::content &&
            tree.id.hex() == kEmptyTreeId && tree.type == ObjectType::directory;
  std::string detail = format(cnt) + ", " + format(tree);
  return ok ? pass(detail) : fail(detail);
}

Result git_oracle() {
  nlohmann::json doc;
  try {
    doc = load_json(SWHID_GIT_ORACLE_VECTORS);
  } catch (const std::exception& e) {
    return fail(std::string("cannot read oracle vectors: ") + e.what());
  }
  auto start = Clock::now();
  std::size_t total = 0, matched = 0;
  std::string first_miss;
  auto tally = [&](const char* kind, std::size_t i, const ObjectId& got, const nlohmann::json& want) {
    ++total;
    if (got.hex() == want.get<std::string>())
      ++matched;
    else if (first_miss.empty())
      first_miss = std::string(kind) + " #" + std::to_string(i);
  };
  try {
    for (std::size_t i = 0; i < doc["contents"].size(); ++i)
      tally("content", i, content_id(Content{b64(doc["contents"][i]["data_b64"])}), doc["contents"][i]["id"]);
    for (std::size_t i = 0; i < doc["directories"].size(); ++i)
      tally("directory", i, directory_id(directory_from(doc["directories"][i]["tree"])),
            doc["directories"][i]["id"]);
    for (std::size_t i = 0; i < doc["revisions"].size(); ++i)
      tally("revision", i, revision_id(revision_from(doc["revisions"][i])), doc["revisions"][i]["id"]);
    for (std::size_t i = 0; i < doc["releases"].size(); ++i)
      tally("release", i, release_id(release_from(doc["releases"][i])), doc["releases"][i]["id"]);
  } catch (const std::exception& e) {
    return fail(std::string("error while hashing: ") + e.what());
  }
  double elapsed = seconds_since(start);
  std::string detail = std::to_string(matched) + "/" + std::to_string(total) + " match git (" +
                       doc.value("generator", std::string("git")) + ") in " + fixed(elapsed) + " s";
  if (!first_miss.empty()) detail += "; first mismatch: " + first_miss;
  if (total < kOracleRequired || matched != total || elapsed >= kOracleMaxSeconds) return fail(detail);
  return pass(detail);
}

Result snapshot_fixture() {
  auto doc = load_json(data_dir() / "vectors" / "reference.json")["fixture_snapshot"];
  std::string want = doc["id"];
  if (want != "de5c3c0924861ebc4c67b00e1dd70869bbcae71c") return fail("frozen vector was altered");
  std::vector<nlohmann::json> branches(doc["branches"].begin(), doc["branches"].end());
  std::mt19937_64 rng(4);
  int permutations = 0;
  for (int i = 0; i < 50; ++i) {
    std::shuffle(branches.begin(), branches.end(), rng);
    auto got = snapshot_id(snapshot_from(nlohmann::json{{"branches", branches}})).hex();
    if (got != want) return fail("permutation " + std::to_string(i) + " gave " + got);
    ++permutations;
  }
  return pass("swh:1:snp:" + want + " under " + std::to_string(permutations) + " branch permutations");
}

std::string random_origin(std::mt19937_64& rng) {
  static const char* schemes[] = {"https", "http", "git", "svn+ssh"};
  static const char* hosts[] = {"github.com", "gitorious.org", "example.org:8080", "[::1]", "host.example"};
  static const char* segments[] = {"parmap", "a%20b", "Quake-III-Arena", "caf\xc3\xa9", "x.git", "~user"};
  std::string url = std::string(schemes[rng() % 4]) + "://" + hosts[rng() % 5];
  for (int n = static_cast<int>(rng() % 4); n > 0; --n) url += std::string("/") + segments[rng() % 6];
  if (rng() % 4 == 0) url += "?ref=main&x=1";
  if (rng() % 5 == 0) url += "#frag";
  return url;
}

Result grammar() {
  std::mt19937_64 rng(1000);
  int ok = 0;
  std::string failure;
  for (int i = 0; i < kRoundTrips; ++i) {
    QualifiedSwhid x;
    x.core.type = kAllObjectTypes[rng() % 5];
    std::array<std::uint8_t, 20> raw{};
    for (auto& b : raw) b = static_cast<std::uint8_t>(rng());
    x.core.id = ObjectId(raw);
    if (rng() % 2) x.origin = random_origin(rng);
    if (rng() % 2) {
      std::uint64_t start = 1 + rng() % 100000;
      x.lines = LineRange{start, rng() % 2 ? std::optional<std::uint64_t>(start + rng() % 1000) : std::nullopt};
    }
    // text in either qualifier order
    std::string lines_q, origin_q;
    if (x.lines)
      lines_q = ";lines=" + std::to_string(x.lines->start) +
                (x.lines->end ? "-" + std::to_string(*x.lines->end) : "");
    if (x.origin) origin_q = ";origin=" + *x.origin;
    std::string text = format(x.core) + (rng() % 2 ? origin_q + lines_q : lines_q + origin_q);
    std::string canonical = format(x);
    try {
      bool good = parse(text) == x && format(parse(text)) == canonical && parse(canonical) == x &&
                  format(parse(canonical)) == canonical;
      if (good) ++ok;
      else if (failure.empty()) failure = text;
    } catch (const std::exception& e) {
      if (failure.empty()) failure = text + ": " + e.what();
    }
  }

  const std::string h40 = "94a9ed024d3859793618152ea559a168bbcbb5e2";
  const std::string c = "swh:1:cnt:" + h40;
  using K = DiagnosticKind;
  const std::vector<std::pair<std::string, K>> invalid = {
      {"", K::BadPrefix},
      {"swh", K::BadPrefix},
      {"SWH:1:cnt:" + h40, K::BadPrefix},
      {"urn:1:cnt:" + h40, K::BadPrefix},
      {" " + c, K::BadPrefix},
      {"swh:2:cnt:" + h40, K::UnsupportedVersion},
      {"swh:0:cnt:" + h40, K::UnsupportedVersion},
      {"swh:1:cnt:" + h40.substr(0, 39), K::BadHex},
      {"swh:1:cnt:" + h40 + "0", K::BadHex},
      {"swh:1:cnt:" + h40.substr(0, 39) + "g", K::BadHex},
      {"swh:1:xyz:" + h40, K::BadType},
      {"swh:1:ori:" + h40, K::BadType},
      {c + ";foo=bar", K::BadQualifier},
      {c + ";lines=1;lines=2", K::BadQualifier},
      {c + ";origin=", K::BadQualifier},
      {c + ";origin=not a url", K::BadQualifier},
      {c + ";", K::BadQualifier},
      {c + ";lines=143-101", K::BadLineRange},
      {c + ";lines=0", K::BadLineRange},
      {c + ";lines=0-5", K::BadLineRange},
  };
  int rejected = 0;
  for (const auto& [text, kind] : invalid) {
    try {
      parse(text);
      if (failure.empty()) failure = "accepted invalid '" + text + "'";
    } catch (const ParseError& e) {
      if (e.kind() == kind)
        ++rejected;
      else if (failure.empty())
        failure = "'" + text + "' gave " + std::string(to_string(e.kind()));
    }
  }

  struct Example {
    const char* text;
    ObjectType type;
  };
  const Example examples[] = {
      {"swh:1:cnt:94a9ed024d3859793618152ea559a168bbcbb5e2", ObjectType::content},
      {"swh:1:dir:d198bc9d7a6bcf6db04f476d29314f157507d505", ObjectType::directory},
      {"swh:1:rev:309cf2674ee7a0749978cf8265ab91a60aea0f7d", ObjectType::revision},
      {"swh:1:rel:22ece559cc7cc2364edc5e5593d63ae8bd229f9f", ObjectType::release},
      {"swh:1:snp:c7c108084bc0bf3d81436bf980b46e98bd338453", ObjectType::snapshot},
  };
  int example_ok = 0;
  for (const auto& ex : examples) {
    try {
      auto id = parse(ex.text);
      if (id.core.type == ex.type && format(id) == ex.text) ++example_ok;
    } catch (const ParseError&) {
    }
  }
  bool parmap_ok = false;
  try {
    auto id = parse(
        "swh:1:cnt:d5214ff9562a1fe78db51944506ba48c20de3379;"
        "origin=https://gitorious.org/parmap/parmap.git;lines=101-143");
    parmap_ok = id.core.type == ObjectType::content && id.origin == "https://gitorious.org/parmap/parmap.git" &&
                id.lines == LineRange{101, 143};
  } catch (const ParseError&) {
  }

  std::string detail = std::to_string(ok) + "/" + std::to_string(kRoundTrips) + " round trips, " +
                       std::to_string(rejected) + "/" + std::to_string(invalid.size()) + " invalid rejected, " +
                       std::to_string(example_ok) + "/5 examples, Parmap " + (parmap_ok ? "ok" : "FAILED");
  if (!failure.empty()) detail += "; first problem: " + failure;
  bool all = ok == kRoundTrips && rejected == static_cast<int>(invalid.size()) && example_ok == 5 && parmap_ok;
  return all ? pass(detail) : fail(detail);
}

Result mutation_suite() {
  TempDir tree, store;
  std::mt19937_64 rng(50);
  std::vector<fs::path> files;
  for (int i = 0; i < kMutationFiles; ++i) {
    fs::path rel = fs::path("d" + std::to_string(rng() % 4)) / ("s" + std::to_string(rng() % 3)) /
                   ("file" + std::to_string(i) + ".bin");
    Bytes data = random_bytes(rng, 16384);
    if (data.empty()) data = "x";
    write_file(tree / rel, data);
    files.push_back(rel);
  }
  auto id = run_cli({"identify", "--store", store.path().string(), tree.path().string()});
  if (id.status != 0) return fail("identify failed: " + id.err);
  std::string dir_id = id.out.substr(0, id.out.find('\t'));
  if (run_cli({"verify", dir_id, tree.path().string()}).status != 0) return fail("unmodified tree did not verify");

  int flipped = 0, localized = 0;
  std::string problem;
  for (const auto& rel : files) {
    fs::path path = tree / rel;
    Bytes original = slurp(path);
    std::string cnt_id = run_cli({"identify", path.string()}).out;
    cnt_id = cnt_id.substr(0, cnt_id.find('\t'));
    int before = run_cli({"verify", cnt_id, path.string()}).status;

    Bytes mutated = original;
    std::size_t pos = rng() % mutated.size();
    mutated[pos] = static_cast<char>(mutated[pos] ^ (1 + rng() % 255));
    write_file(path, mutated);
    int after = run_cli({"verify", cnt_id, path.string()}).status;
    if (before == 0 && after == 1)
      ++flipped;
    else if (problem.empty())
      problem = rel.string() + ": exit " + std::to_string(before) + " -> " + std::to_string(after);

    auto report = run_cli({"verify", "--json", "--store", store.path().string(), dir_id, tree.path().string()});
    try {
      auto doc = nlohmann::json::parse(report.out);
      if (report.status == 1 && doc["detail"].size() == 1 && doc["detail"][0]["path"] == rel.string() &&
          doc["detail"][0]["kind"] == "changed")
        ++localized;
      else if (problem.empty())
        problem = rel.string() + " not localized";
    } catch (const std::exception&) {
      if (problem.empty()) problem = "verify --json output unreadable";
    }
    write_file(path, original);
  }
  if (run_cli({"verify", dir_id, tree.path().string()}).status != 0) return fail("restored tree did not verify");
  std::string detail = std::to_string(flipped) + "/" + std::to_string(kMutationFiles) + " flips detected, " +
                       std::to_string(localized) + "/" + std::to_string(kMutationFiles) + " localized";
  if (!problem.empty()) detail += "; first problem: " + problem;
  return flipped == kMutationFiles && localized == kMutationFiles ? pass(detail) : fail(detail);
}

Result no_middleman() {
  MockArchive mock;
  mock.corrupt_every(kCorruptEvery);
  TempDir dir;
  std::mt19937_64 rng(7);
  int corrupted = 0, rejected = 0, clean = 0, delivered = 0;
  std::string problem;
  for (int i = 1; i <= kFetchAttempts; ++i) {
    Bytes data = random_bytes(rng, 8192);
    auto id = mock.add_content(data);
    fs::path target = dir / ("fetched" + std::to_string(i));
    bool will_corrupt = i % kCorruptEvery == 0;  // i-th raw request
    auto r = run_cli({"resolve", "--fetch", target.string(), "--endpoint", mock.base_url(), format(id)});
    bool written = fs::exists(target) || fs::exists(target.string() + ".part");
    if (will_corrupt) {
      ++corrupted;
      if (r.status == 1 && !written)
        ++rejected;
      else if (problem.empty())
        problem = "corrupted response " + std::to_string(i) + ": exit " + std::to_string(r.status) +
                  (written ? ", file written" : "");
    } else {
      ++clean;
      if (r.status == 0 && written && slurp(target) == data)
        ++delivered;
      else if (problem.empty())
        problem = "clean response " + std::to_string(i) + ": exit " + std::to_string(r.status);
    }
  }
  std::string detail = std::to_string(rejected) + "/" + std::to_string(corrupted) +
                       " corrupted responses rejected with exit 1 and nothing written, " +
                       std::to_string(delivered) + "/" + std::to_string(clean) + " clean responses delivered";
  if (!problem.empty()) detail += "; first problem: " + problem;
  return rejected == corrupted && delivered == clean ? pass(detail) : fail(detail);
}

Result deduplication() {
  TempDir tree, store;
  for (int i = 0; i < 10; ++i) write_file(tree / ("dup" + std::to_string(i) + ".txt"), "identical payload\n");
  auto first = ingest_path(tree.path());
  std::size_t contents = first.store.count(ObjectType::content);
  std::size_t written = first.store.save(store.path());
  auto again = ingest_path(tree.path());
  std::size_t rewritten = again.store.save(store.path());
  auto persisted = ObjectStore::load(store.path());
  std::size_t before = persisted.size();
  persisted.merge(again.store);
  std::size_t added = persisted.size() - before;
  std::string detail = std::to_string(contents) + " content object for 10 identical files, re-ingest added " +
                       std::to_string(rewritten) + " files / " + std::to_string(added) + " objects";
  bool ok = contents == 1 && written == 2 && rewritten == 0 && added == 0 && again.root == first.root;
  return ok ? pass(detail) : fail(detail);
}

Result live_archive() {
  if (std::getenv("SWHID_OFFLINE")) return skip("SWHID_OFFLINE set");
  ClientOptions options;
  options.retries = 0;
  options.timeout = std::chrono::seconds(5);
  ArchiveClient client(ArchiveEndpoint{}, options);
  const std::pair<const char*, ObjectType> ids[] = {
      {"swh:1:rel:22ece559cc7cc2364edc5e5593d63ae8bd229f9f", ObjectType::release},
      {"swh:1:rev:309cf2674ee7a0749978cf8265ab91a60aea0f7d", ObjectType::revision},
      {"swh:1:snp:c7c108084bc0bf3d81436bf980b46e98bd338453", ObjectType::snapshot},
  };
  int confirmed = 0;
  for (const auto& [text, type] : ids) {
    try {
      auto meta = client.resolve_metadata(parse_core(text));
      if (meta.object_kind_confirmed && meta.swhid.type == type) ++confirmed;
    } catch (const ResolveError& e) {
      if (e.kind() == ResolveErrorKind::TransportError) return skip(std::string("archive unreachable: ") + e.what());
      return fail(std::string(text) + ": " + e.what());
    }
  }
  std::string detail = std::to_string(confirmed) + "/3 objects confirmed on the live archive";
  return confirmed == 3 ? pass(detail) : fail(detail);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"1 GPL3 content fixture", gpl3_fixture},
      {"2 empty content and empty directory", degenerate_fixtures},
      {"3 git oracle equivalence", git_oracle},
      {"4 snapshot fixture and branch permutation", snapshot_fixture},
      {"5 grammar round trip and rejection", grammar},
      {"6 integrity mutation suite", mutation_suite},
      {"7 no-middleman fetch", no_middleman},
      {"8 deduplication", deduplication},
      {"9 live archive resolution (network-optional)", live_archive},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = fail(std::string("exception: ") + e.what());
    }
    const char* tag = r.outcome == Outcome::pass ? "PASS" : r.outcome == Outcome::fail ? "FAIL" : "SKIP";
    if (r.outcome == Outcome::fail) ++failures;
    std::cout << tag << "  " << name << ": " << r.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
