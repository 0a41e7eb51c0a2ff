#pragma once

#include <array>
#include <cstdint>

#include "faircert/bytes.hpp"
#include "faircert/fairness.hpp"

namespace faircert {

using Digest = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;
using SecretKey = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;

/// SHA3-256 (FIPS 202).
Digest sha3_256(ByteView data);

struct ModelDigest {
  Digest root{};
  friend bool operator==(const ModelDigest&, const ModelDigest&) = default;
};

inline constexpr std::size_t kMerkleChunk = 64;

/// Merkle root over 64-byte chunks (last one zero-padded) plus an 8-byte LE length
/// leaf. leaf = H(0x00 | chunk), node = H(0x01 | left | right), an unpaired node
/// is promoted unchanged. Throws EMPTY_INPUT for empty data.
ModelDigest merkle_root(ByteView data);

struct KeyPair {
  SecretKey signing_key{};
  PublicKey verification_key{};
};

/// Ed25519 (RFC 8032); the seed is the private key.
KeyPair keygen(std::span<const std::uint8_t> seed);
/// Deterministic. Throws MALFORMED_KEY for a wrong-length key.
Signature sign(std::span<const std::uint8_t> signing_key, ByteView message);
bool verify(std::span<const std::uint8_t> verification_key, ByteView message, std::span<const std::uint8_t> signature);

/// Fingerprint published alongside the key: SHA3-256(vk).
Digest key_id(const PublicKey& vk);

struct Certificate {
  ModelDigest digest;
  FairnessSpec spec;
  Signature signature{};
  Digest regulator_key_id{};

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

inline constexpr std::uint32_t kAlphaAbsent = 0xFFFFFFFFu;

/// metric u8 | ε u32 | δ u32 | α u32 (0xFFFFFFFF if absent) | len u16 | fairness string
Bytes encode_spec(const FairnessSpec& spec);
FairnessSpec decode_spec(ByteReader& reader);

/// "FCRT1" | digest | spec encoding
Bytes certificate_message(const ModelDigest& digest, const FairnessSpec& spec);

Certificate issue_certificate(const KeyPair& keys, const ModelDigest& digest, const FairnessSpec& spec);
/// Checks the key fingerprint and the signature over the re-encoded message.
bool verify_certificate(const PublicKey& vk, const Certificate& cert);

/// message | regulator_key_id | signature
Bytes encode_certificate(const Certificate& cert);
Certificate decode_certificate(ByteView bytes);

/// "FAIRK1" | signing key | verification key
Bytes encode_keypair(const KeyPair& keys);
KeyPair decode_keypair(ByteView bytes);

}  // namespace faircert
