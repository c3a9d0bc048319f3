#include "swhid/ingest.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace swhid {

namespace fs = std::filesystem;

namespace {

struct FsNode {
  fs::path absolute;
  fs::path relative;
  Bytes name;
  EntryPermission permission = EntryPermission::regular_file;
  std::vector<std::size_t> children;
  CoreSwhid id;
};

bool excluded(const std::vector<std::string>& patterns, const Bytes& name,
              const fs::path& relative) {
  for (const auto& p : patterns) {
    if (fnmatch(p.c_str(), name.c_str(), 0) == 0) return true;
    if (fnmatch(p.c_str(), relative.c_str(), FNM_PATHNAME) == 0) return true;
  }
  return false;
}

fs::file_status status_of(const fs::path& path) {
  std::error_code ec;
  auto st = fs::symlink_status(path, ec);
  if (ec && st.type() != fs::file_type::not_found)
    throw IngestError(IngestErrorKind::Unreadable, "cannot stat " + path.string() + ": " + ec.message());
  if (st.type() == fs::file_type::not_found)
    throw IngestError(IngestErrorKind::NotFound, "no such file or directory: " + path.string());
  return st;
}

class Walker {
 public:
  Walker(const IngestOptions& options, ObjectStore& store)
      : options_(options), store_(store) {}

  std::size_t add(const fs::path& absolute, const fs::path& relative, Bytes name) {
    auto st = status_of(absolute);
    FsNode node{absolute, relative, std::move(name), EntryPermission::regular_file, {}, {}};
    switch (st.type()) {
      case fs::file_type::regular:
        if ((st.permissions() & fs::perms::owner_exec) != fs::perms::none)
          node.permission = EntryPermission::executable_file;
        break;
      case fs::file_type::symlink:
        node.permission = EntryPermission::symlink;
        break;
      case fs::file_type::directory:
        node.permission = EntryPermission::directory;
        break;
      default:
        throw IngestError(IngestErrorKind::UnsupportedNodeKind,
                          "unsupported file type (socket, device or fifo): " + absolute.string());
    }
    std::size_t index = nodes_.size();
    nodes_.push_back(std::move(node));
    if (nodes_[index].permission == EntryPermission::directory) {
      add_children(index);
    } else {
      files_.push_back(index);
    }
    return index;
  }

  void hash_files() {
    unsigned jobs = options_.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : options_.jobs;
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, files_.size()));
    if (jobs <= 1) {
      for (auto i : files_) hash_file(nodes_[i]);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> workers;
      for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
          for (std::size_t k; (k = next.fetch_add(1)) < files_.size();) {
            try {
              hash_file(nodes_[files_[k]]);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
              next = files_.size();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  // Children are hashed before their parent; appends to `order` post-order.
  void hash_directories(std::size_t index, std::vector<std::size_t>& order) {
    FsNode& node = nodes_[index];
    if (node.permission == EntryPermission::directory) {
      Directory dir;
      for (auto c : node.children) {
        hash_directories(c, order);
        dir.entries.push_back({nodes_[c].name, nodes_[c].permission, nodes_[c].id.id});
      }
      nodes_[index].id = store_.insert(directory_manifest(dir)).first;
    }
    order.push_back(index);
  }

  const FsNode& node(std::size_t i) const { return nodes_[i]; }

 private:
  void add_children(std::size_t index) {
    fs::path dir = nodes_[index].absolute;
    fs::path rel = nodes_[index].relative;
    std::vector<fs::directory_entry> entries;
    std::error_code ec;
    fs::directory_iterator it(dir, ec);
    if (ec)
      throw IngestError(IngestErrorKind::Unreadable, "cannot read directory " + dir.string() + ": " + ec.message());
    for (; it != fs::directory_iterator(); it.increment(ec)) {
      if (ec) break;
      entries.push_back(*it);
    }
    if (ec)
      throw IngestError(IngestErrorKind::Unreadable, "cannot read directory " + dir.string() + ": " + ec.message());
    for (const auto& e : entries) {
      Bytes name = e.path().filename().native();
      fs::path child_rel = rel / name;
      if (excluded(options_.excludes, name, child_rel)) continue;
      std::size_t child = add(e.path(), child_rel, name);
      nodes_[index].children.push_back(child);
    }
  }

  void hash_file(FsNode& node) {
    Bytes data;
    if (node.permission == EntryPermission::symlink) {
      std::error_code ec;
      auto target = fs::read_symlink(node.absolute, ec);
      if (ec)
        throw IngestError(IngestErrorKind::Unreadable, "cannot read link " + node.absolute.string());
      data = target.native();
    } else {
      data = read_file(node.absolute);
    }
    node.id = store_.insert(content_manifest(Content{std::move(data)})).first;
  }

  const IngestOptions& options_;
  ObjectStore& store_;
  std::vector<FsNode> nodes_;
  std::vector<std::size_t> files_;
};

class TreeDiff {
 public:
  TreeDiff(const ObjectStore& expected, const ObjectStore& actual, std::size_t limit,
           std::vector<Divergence>& out)
      : expected_(expected), actual_(actual), limit_(limit), out_(out) {}

  void run(const ObjectId& expected, const ObjectId& actual, const fs::path& prefix) {
    if (out_.size() >= limit_) return;
    auto exp_manifest = expected_.get(dir_key(expected));
    auto act_manifest = actual_.get(dir_key(actual));
    if (!exp_manifest || !act_manifest) {
      push(prefix, DivergenceKind::changed, dir_key(expected), dir_key(actual));
      return;
    }
    std::map<Bytes, DirectoryEntry> exp_entries;
    std::map<Bytes, DirectoryEntry> act_entries;
    for (auto& e : parse_directory_manifest(*exp_manifest).entries) exp_entries.emplace(e.name, e);
    for (auto& e : parse_directory_manifest(*act_manifest).entries) act_entries.emplace(e.name, e);

    auto key_of = [](const DirectoryEntry& e) {
      return CoreSwhid{kSchemaVersion, target_type(e.permission), e.target};
    };
    auto ei = exp_entries.begin();
    auto ai = act_entries.begin();
    while ((ei != exp_entries.end() || ai != act_entries.end()) && out_.size() < limit_) {
      if (ai == act_entries.end() || (ei != exp_entries.end() && ei->first < ai->first)) {
        push(prefix / ei->first, DivergenceKind::removed, key_of(ei->second), std::nullopt);
        ++ei;
      } else if (ei == exp_entries.end() || ai->first < ei->first) {
        push(prefix / ai->first, DivergenceKind::added, std::nullopt, key_of(ai->second));
        ++ai;
      } else {
        const auto& e = ei->second;
        const auto& a = ai->second;
        if (e.permission == EntryPermission::directory && a.permission == EntryPermission::directory) {
          if (e.target != a.target) run(e.target, a.target, prefix / ei->first);
        } else if (e.target != a.target || e.permission != a.permission) {
          push(prefix / ei->first, DivergenceKind::changed, key_of(e), key_of(a));
        }
        ++ei;
        ++ai;
      }
    }
  }

 private:
  static CoreSwhid dir_key(const ObjectId& id) {
    return {kSchemaVersion, ObjectType::directory, id};
  }
  void push(fs::path path, DivergenceKind kind, std::optional<CoreSwhid> expected,
            std::optional<CoreSwhid> actual) {
    out_.push_back({std::move(path), kind, expected, actual});
  }

  const ObjectStore& expected_;
  const ObjectStore& actual_;
  std::size_t limit_;
  std::vector<Divergence>& out_;
};

}  // namespace

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!fs::exists(fs::symlink_status(path, ec)))
      throw IngestError(IngestErrorKind::NotFound, "no such file: " + path.string());
    throw IngestError(IngestErrorKind::Unreadable, "cannot open " + path.string());
  }
  Bytes data;
  std::error_code ec;
  auto size = fs::file_size(path, ec);
  if (!ec) data.reserve(size);
  data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (in.bad()) throw IngestError(IngestErrorKind::Unreadable, "read error on " + path.string());
  return data;
}

IngestResult ingest_path(const fs::path& path, const IngestOptions& options) {
  IngestResult result;
  Walker walker(options, result.store);
  std::size_t root = walker.add(path, fs::path(), path.filename().native());
  walker.hash_files();
  std::vector<std::size_t> order;
  walker.hash_directories(root, order);
  result.nodes.reserve(order.size());
  for (auto i : order) {
    const auto& n = walker.node(i);
    result.nodes.push_back({n.relative, n.id, n.permission});
  }
  result.root = walker.node(root).id;
  return result;
}

std::string_view to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::changed: return "changed";
    case DivergenceKind::added: return "added";
    case DivergenceKind::removed: return "removed";
  }
  return "?";
}

VerificationReport verify_path(const QualifiedSwhid& expected, const fs::path& path,
                               const VerifyOptions& options) {
  const ObjectType want = expected.core.type;
  if (want != ObjectType::content && want != ObjectType::directory)
    throw IngestError(IngestErrorKind::TypeMismatch,
                      std::string(type_name(want)) + " type not verifiable from a filesystem path");

  auto st = status_of(path);
  bool is_dir = st.type() == fs::file_type::directory;
  if (is_dir != (want == ObjectType::directory))
    throw IngestError(IngestErrorKind::TypeMismatch,
                      "expected a " + std::string(type_name(want)) + " but " + path.string() +
                          (is_dir ? " is a directory" : " is not a directory"));

  auto ingested = ingest_path(path, options.ingest);
  VerificationReport report{expected.core, ingested.root, expected.core == ingested.root, {}};
  if (report.matched || want != ObjectType::directory) return report;

  if (options.reference) {
    TreeDiff(*options.reference, ingested.store, options.max_divergences, report.detail)
        .run(expected.core.id, ingested.root.id, fs::path());
  }
  if (report.detail.empty())
    report.detail.push_back({fs::path(), DivergenceKind::changed, expected.core, ingested.root});
  return report;
}

Bytes extract_lines(std::string_view data, const LineRange& range) {
  std::size_t begin = 0;
  for (std::uint64_t line = 1; line < range.start; ++line) {
    std::size_t nl = data.find('\n', begin);
    if (nl == std::string_view::npos) {
      begin = std::string_view::npos;
      break;
    }
    begin = nl + 1;
  }
  if (begin == std::string_view::npos || begin >= data.size())
    throw IngestError(IngestErrorKind::RangeOutOfBounds,
                      "line " + std::to_string(range.start) + " is past the end of the data");
  std::size_t end = begin;
  for (std::uint64_t line = range.start; line <= range.last(); ++line) {
    std::size_t nl = data.find('\n', end);
    if (nl == std::string_view::npos) {
      end = data.size();
      break;
    }
    end = nl + 1;
  }
  return Bytes(data.substr(begin, end - begin));
}

}  // namespace swhid
