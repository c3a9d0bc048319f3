#pragma once

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "swhid/merkle.hpp"
#include "swhid/syntax.hpp"

namespace swhid::test {

// Local stand-in for the archive REST API: /api/1/resolve/<swhid>/ and
// /api/1/content/sha1_git:<hex>/raw/.
class MockArchive {
 public:
  MockArchive() {
    server_.Get(R"(/api/1/resolve/([^/]+)/)", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (fail_next_.load() > 0) {
        --fail_next_;
        res.status = 503;
        return;
      }
      std::string text = req.matches[1];
      std::lock_guard lock(mutex_);
      auto it = known_.find(text);
      if (it == known_.end()) {
        res.status = 404;
        res.set_content(R"({"exception":"NotFoundExc"})", "application/json");
        return;
      }
      nlohmann::json doc{{"object_type", it->second.reported_type},
                         {"object_id", it->second.id.id.hex()},
                         {"browse_url", "https://archive.example/browse/" + text + "/"},
                         {"namespace", "swh"},
                         {"scheme_version", 1}};
      res.set_content(doc.dump(), "application/json");
    });
    server_.Get(R"(/api/1/content/sha1_git:([0-9a-f]{40})/raw/)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  ++requests_;
                  ++raw_requests_;
                  if (fail_next_.load() > 0) {
                    --fail_next_;
                    res.status = 503;
                    return;
                  }
                  std::lock_guard lock(mutex_);
                  auto it = contents_.find(req.matches[1]);
                  if (it == contents_.end()) {
                    res.status = 404;
                    return;
                  }
                  Bytes body = it->second;
                  bool corrupt = corrupt_every_ > 0 && raw_requests_ % corrupt_every_ == 0;
                  if (corrupt_all_ || corrupt) {
                    if (body.empty())
                      body = "x";
                    else
                      body[body.size() / 2] ^= 0x01;
                  }
                  res.set_content(body, "application/octet-stream");
                });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockArchive() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MockArchive(const MockArchive&) = delete;
  MockArchive& operator=(const MockArchive&) = delete;

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api/1/"; }

  void add_object(const CoreSwhid& id, std::string reported_type = {}) {
    std::lock_guard lock(mutex_);
    if (reported_type.empty()) reported_type = std::string(type_name(id.type));
    known_[format(id)] = {id, reported_type};
  }

  CoreSwhid add_content(Bytes data) {
    CoreSwhid id{kSchemaVersion, ObjectType::content, content_id(Content{data})};
    add_object(id);
    std::lock_guard lock(mutex_);
    contents_[id.id.hex()] = std::move(data);
    return id;
  }

  // Flip one byte in every raw response, or in every n-th one.
  void corrupt_all(bool on) { corrupt_all_ = on; }
  void corrupt_every(int n) { corrupt_every_ = n; }
  // Answer the next n requests with HTTP 503.
  void fail_next(int n) { fail_next_ = n; }

  int requests() const { return requests_; }

 private:
  struct Known {
    CoreSwhid id;
    std::string reported_type;
  };

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  std::map<std::string, Known> known_;
  std::map<std::string, Bytes> contents_;
  std::atomic<int> requests_{0};
  std::atomic<int> raw_requests_{0};
  std::atomic<int> fail_next_{0};
  std::atomic<bool> corrupt_all_{false};
  std::atomic<int> corrupt_every_{0};
};

}  // namespace swhid::test
