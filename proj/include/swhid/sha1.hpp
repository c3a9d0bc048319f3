#pragma once

#include <memory>
#include <string_view>

#include "swhid/object_id.hpp"

namespace swhid {

// Incremental SHA1. Schema version 1 identifiers are always SHA1.
class Sha1 {
 public:
  Sha1();
  ~Sha1();
  Sha1(Sha1&&) noexcept;
  Sha1& operator=(Sha1&&) noexcept;

  Sha1& update(std::string_view data);
  ObjectId finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ObjectId sha1(std::string_view data);

}  // namespace swhid
