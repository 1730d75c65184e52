#include "medcurate/digest.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "medcurate/errors.hpp"
#include "medcurate/text.hpp"

namespace medcurate {
namespace {

using CtxPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

CtxPtr new_ctx() {
  CtxPtr ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 initialization failed");
  return ctx;
}

Digest finish(EVP_MD_CTX* ctx) {
  Digest d;
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, d.bytes.data(), &len) != 1 || len != d.bytes.size())
    throw Error("SHA-256 finalization failed");
  return d;
}

}  // namespace

std::string Digest::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

std::uint64_t Digest::prefix64() const {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
  return v;
}

Digest sha256(std::string_view data) {
  auto ctx = new_ctx();
  EVP_DigestUpdate(ctx.get(), data.data(), data.size());
  return finish(ctx.get());
}

Digest sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  auto ctx = new_ctx();
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  return finish(ctx.get());
}

Digest content_hash(std::string_view text) { return sha256(text::canonicalize(text)); }

}  // namespace medcurate
