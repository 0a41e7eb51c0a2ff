#include "faircert/crypto.hpp"

#include <openssl/evp.h>

#include <memory>

namespace faircert {

namespace {

constexpr std::string_view kCertMagic = "FCRT1";
constexpr std::string_view kKeyMagic = "FAIRK1";

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const noexcept { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const noexcept { EVP_MD_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

const EVP_MD* sha3() {
  static const EVP_MD* md = EVP_sha3_256();
  return md;
}

Digest hash_parts(std::uint8_t prefix, ByteView a, ByteView b = {}) {
  MdCtxPtr ctx(EVP_MD_CTX_new());
  require(ctx && EVP_DigestInit_ex(ctx.get(), sha3(), nullptr) == 1, ErrorCode::io_error, "digest init");
  EVP_DigestUpdate(ctx.get(), &prefix, 1);
  EVP_DigestUpdate(ctx.get(), a.data(), a.size());
  if (!b.empty()) EVP_DigestUpdate(ctx.get(), b.data(), b.size());
  Digest out{};
  unsigned int len = 0;
  require(EVP_DigestFinal_ex(ctx.get(), out.data(), &len) == 1 && len == out.size(), ErrorCode::io_error,
          "digest final");
  return out;
}

PkeyPtr private_key(std::span<const std::uint8_t> sk) {
  require(sk.size() == 32, ErrorCode::malformed_key, "signing key must be 32 bytes");
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, sk.data(), sk.size()));
  require(key != nullptr, ErrorCode::malformed_key, "rejected signing key");
  return key;
}

}  // namespace

Digest sha3_256(ByteView data) {
  Digest out{};
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), out.data(), &len, sha3(), nullptr) == 1, ErrorCode::io_error,
          "sha3-256");
  return out;
}

ModelDigest merkle_root(ByteView data) {
  require(!data.empty(), ErrorCode::empty_input, "cannot hash empty input");
  std::vector<Digest> level;
  level.reserve(data.size() / kMerkleChunk + 2);
  for (std::size_t off = 0; off < data.size(); off += kMerkleChunk) {
    const std::size_t n = std::min(kMerkleChunk, data.size() - off);
    if (n == kMerkleChunk) {
      level.push_back(hash_parts(0x00, data.subspan(off, n)));
    } else {
      std::array<std::uint8_t, kMerkleChunk> padded{};
      std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(off), n, padded.begin());
      level.push_back(hash_parts(0x00, padded));
    }
  }
  const Bytes trailer = ByteWriter().u64(data.size()).view();
  level.push_back(hash_parts(0x00, trailer));

  while (level.size() > 1) {
    std::vector<Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(hash_parts(0x01, level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return ModelDigest{level.front()};
}

KeyPair keygen(std::span<const std::uint8_t> seed) {
  PkeyPtr key = private_key(seed);
  KeyPair kp;
  std::copy(seed.begin(), seed.end(), kp.signing_key.begin());
  std::size_t len = kp.verification_key.size();
  require(EVP_PKEY_get_raw_public_key(key.get(), kp.verification_key.data(), &len) == 1 && len == 32,
          ErrorCode::malformed_key, "public key derivation");
  return kp;
}

Signature sign(std::span<const std::uint8_t> signing_key, ByteView message) {
  PkeyPtr key = private_key(signing_key);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  require(ctx && EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) == 1, ErrorCode::malformed_key,
          "sign init");
  Signature sig{};
  std::size_t len = sig.size();
  require(EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) == 1 && len == sig.size(),
          ErrorCode::malformed_key, "sign");
  return sig;
}

bool verify(std::span<const std::uint8_t> verification_key, ByteView message, std::span<const std::uint8_t> signature) {
  require(verification_key.size() == 32, ErrorCode::malformed_key, "verification key must be 32 bytes");
  if (signature.size() != 64) return false;
  PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, verification_key.data(), verification_key.size()));
  if (!key) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(), message.size()) == 1;
}

Digest key_id(const PublicKey& vk) { return sha3_256(vk); }

Bytes encode_spec(const FairnessSpec& spec) {
  spec.validate();
  require(spec.fairness_string.size() <= 0xFFFF, ErrorCode::invalid_argument, "fairness string too long");
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(spec.metric)).u32(spec.epsilon.units).u32(spec.delta.units);
  w.u32(spec.alpha ? spec.alpha->units : kAlphaAbsent);
  w.u16(static_cast<std::uint16_t>(spec.fairness_string.size())).text(spec.fairness_string);
  return std::move(w).take();
}

FairnessSpec decode_spec(ByteReader& r) {
  FairnessSpec spec;
  const std::uint8_t metric = r.u8();
  require(metric <= 2, ErrorCode::protocol_error, "unknown metric id");
  spec.metric = static_cast<FairnessMetric>(metric);
  spec.epsilon.units = r.u32();
  spec.delta.units = r.u32();
  const std::uint32_t alpha = r.u32();
  if (alpha != kAlphaAbsent) spec.alpha = Micro{alpha};
  spec.fairness_string = r.text(r.u16());
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::protocol_error, e.what());
  }
  return spec;
}

Bytes certificate_message(const ModelDigest& digest, const FairnessSpec& spec) {
  ByteWriter w;
  w.text(kCertMagic).bytes(digest.root).bytes(encode_spec(spec));
  return std::move(w).take();
}

Certificate issue_certificate(const KeyPair& keys, const ModelDigest& digest, const FairnessSpec& spec) {
  return Certificate{digest, spec, sign(keys.signing_key, certificate_message(digest, spec)),
                     key_id(keys.verification_key)};
}

bool verify_certificate(const PublicKey& vk, const Certificate& cert) {
  if (cert.regulator_key_id != key_id(vk)) return false;
  return verify(vk, certificate_message(cert.digest, cert.spec), cert.signature);
}

Bytes encode_certificate(const Certificate& cert) {
  ByteWriter w;
  w.bytes(certificate_message(cert.digest, cert.spec)).bytes(cert.regulator_key_id).bytes(cert.signature);
  return std::move(w).take();
}

Certificate decode_certificate(ByteView bytes) {
  ByteReader r(bytes);
  require(r.text(kCertMagic.size()) == kCertMagic, ErrorCode::protocol_error, "bad certificate magic");
  Certificate cert;
  const ByteView digest = r.bytes(32);
  std::copy(digest.begin(), digest.end(), cert.digest.root.begin());
  cert.spec = decode_spec(r);
  const ByteView kid = r.bytes(32);
  std::copy(kid.begin(), kid.end(), cert.regulator_key_id.begin());
  const ByteView sig = r.bytes(64);
  std::copy(sig.begin(), sig.end(), cert.signature.begin());
  r.expect_done("certificate");
  return cert;
}

Bytes encode_keypair(const KeyPair& keys) {
  ByteWriter w;
  w.text(kKeyMagic).bytes(keys.signing_key).bytes(keys.verification_key);
  return std::move(w).take();
}

KeyPair decode_keypair(ByteView bytes) {
  ByteReader r(bytes, ErrorCode::malformed_key);
  require(r.text(kKeyMagic.size()) == kKeyMagic, ErrorCode::malformed_key, "bad key file magic");
  const ByteView sk = r.bytes(32);
  const ByteView vk = r.bytes(32);
  r.expect_done("key file");
  KeyPair kp = keygen(sk);
  require(std::equal(vk.begin(), vk.end(), kp.verification_key.begin()), ErrorCode::malformed_key,
          "verification key does not match signing key");
  return kp;
}

}  // namespace faircert
