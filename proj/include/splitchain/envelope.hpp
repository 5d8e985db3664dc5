#pragma once

// Sealed envelopes: a payload encrypted to one recipient's public key.
// Construction: ephemeral X25519 key agreement + XSalsa20-Poly1305
// (libsodium crypto_box, detached MAC) with a random nonce.
//
// Wire framing, all integers big-endian:
//   "SCEV" | u8 version | (u32 len | bytes) x 5
// with the five fields being recipient fingerprint, ephemeral public key,
// nonce, ciphertext and authentication tag, in that order.

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include "splitchain/bytes.hpp"

namespace splitchain {

inline constexpr std::uint8_t kEnvelopeVersion = 1;

struct KeyPair {
  std::string owner;
  Bytes public_key;
  Bytes private_key;
};

// Deterministic in (owner, seed).
KeyPair keygen(const std::string& owner, std::uint64_t seed);

// SHA-256 of the public key, lowercase hex.
std::string fingerprint(ByteView public_key);

struct SealedEnvelope {
  std::uint8_t version = kEnvelopeVersion;
  Bytes recipient_fingerprint;
  Bytes ephemeral_public;
  Bytes nonce;
  Bytes ciphertext;
  Bytes tag;

  Bytes serialize() const;
  static SealedEnvelope parse(ByteView framed);
};

SealedEnvelope seal(ByteView plaintext, ByteView recipient_public);
// Wrong key and tampering are reported identically, as an authentication error.
Bytes open(const SealedEnvelope& envelope, ByteView private_key);

// Out-of-band public key directory: participant id -> public key.
class KeyDirectory {
 public:
  void add(const std::string& id, Bytes public_key);
  const Bytes& public_key(const std::string& id) const;
  bool contains(const std::string& id) const { return keys_.count(id) != 0; }

  std::string serialize() const;  // "<id> <hex>" per line
  static KeyDirectory deserialize(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static KeyDirectory load(const std::filesystem::path& path);

 private:
  std::map<std::string, Bytes> keys_;
};

}  // namespace splitchain
