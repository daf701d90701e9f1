#include "evc/aead.hpp"

#include <openssl/evp.h>

#include <memory>

#include "evc/errors.hpp"

namespace evc {

namespace {

using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CtxPtr new_ctx() {
  CtxPtr ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  if (!ctx) throw Error(ErrorKind::Protocol, "EVP_CIPHER_CTX_new failed");
  return ctx;
}

int len_of(std::size_t n) { return static_cast<int>(n); }

}  // namespace

Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView aad, ByteView plaintext) {
  CtxPtr ctx = new_ctx();
  Bytes out(plaintext.size() + kAeadTagBytes);
  int n = 0;
  bool ok = EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) == 1;
  ok = ok && (aad.empty() || EVP_EncryptUpdate(ctx.get(), nullptr, &n, aad.data(), len_of(aad.size())) == 1);
  ok = ok && EVP_EncryptUpdate(ctx.get(), out.data(), &n, plaintext.data(), len_of(plaintext.size())) == 1;
  int tail = 0;
  ok = ok && EVP_EncryptFinal_ex(ctx.get(), out.data() + n, &tail) == 1;
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, len_of(kAeadTagBytes),
                                 out.data() + plaintext.size()) == 1;
  if (!ok) throw Error(ErrorKind::Protocol, "AES-GCM encryption failed");
  return out;
}

std::optional<Bytes> aead_open(const AeadKey& key, const AeadNonce& nonce, ByteView aad, ByteView sealed) {
  if (sealed.size() < kAeadTagBytes) return std::nullopt;
  const std::size_t body = sealed.size() - kAeadTagBytes;
  CtxPtr ctx = new_ctx();
  Bytes out(body);
  int n = 0;
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end());
  bool ok = EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) == 1;
  ok = ok && (aad.empty() || EVP_DecryptUpdate(ctx.get(), nullptr, &n, aad.data(), len_of(aad.size())) == 1);
  ok = ok && EVP_DecryptUpdate(ctx.get(), out.data(), &n, sealed.data(), len_of(body)) == 1;
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, len_of(kAeadTagBytes), tag.data()) == 1;
  int tail = 0;
  ok = ok && EVP_DecryptFinal_ex(ctx.get(), out.data() + n, &tail) == 1;
  if (!ok) return std::nullopt;
  return out;
}

}  // namespace evc
