#include "swhid/sha1.hpp"

#include <openssl/evp.h>

namespace swhid {

struct Sha1::Impl {
  struct CtxFree {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
  };
  std::unique_ptr<EVP_MD_CTX, CtxFree> ctx{EVP_MD_CTX_new()};
};

Sha1::Sha1() : impl_(std::make_unique<Impl>()) {
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx.get(), EVP_sha1(), nullptr) != 1)
    throw Error("SHA1 initialization failed");
}

Sha1::~Sha1() = default;
Sha1::Sha1(Sha1&&) noexcept = default;
Sha1& Sha1::operator=(Sha1&&) noexcept = default;

Sha1& Sha1::update(std::string_view data) {
  if (EVP_DigestUpdate(impl_->ctx.get(), data.data(), data.size()) != 1)
    throw Error("SHA1 update failed");
  return *this;
}

ObjectId Sha1::finish() {
  std::array<std::uint8_t, ObjectId::kSize> digest{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx.get(), digest.data(), &len) != 1 ||
      len != ObjectId::kSize)
    throw Error("SHA1 finalization failed");
  return ObjectId(std::span<const std::uint8_t, ObjectId::kSize>(digest));
}

ObjectId sha1(std::string_view data) { return Sha1().update(data).finish(); }

}  // namespace swhid
