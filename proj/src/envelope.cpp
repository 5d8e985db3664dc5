#include "splitchain/envelope.hpp"

#include <sodium.h>

#include <fstream>
#include <sstream>

#include "splitchain/error.hpp"
#include "splitchain/numeric_text.hpp"

namespace splitchain {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'S', 'C', 'E', 'V'};

void put_field(Bytes& out, ByteView field) {
  const auto n = static_cast<std::uint32_t>(field.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
  out.insert(out.end(), field.begin(), field.end());
}

Bytes take_field(ByteView in, std::size_t& pos) {
  if (in.size() - pos < 4) fail(ErrorKind::Parse, "envelope truncated in a length prefix");
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n = (n << 8) | in[pos++];
  if (in.size() - pos < n) fail(ErrorKind::Parse, "envelope truncated in a field body");
  Bytes out(in.begin() + static_cast<std::ptrdiff_t>(pos), in.begin() + static_cast<std::ptrdiff_t>(pos + n));
  pos += n;
  return out;
}

Bytes fingerprint_bytes(ByteView public_key) {
  ensure_sodium();
  Bytes fp(crypto_hash_sha256_BYTES);
  crypto_hash_sha256(fp.data(), public_key.data(), public_key.size());
  return fp;
}

[[noreturn]] void auth_failure() { fail(ErrorKind::Authentication, "envelope cannot be opened with this key"); }

}  // namespace

KeyPair keygen(const std::string& owner, std::uint64_t seed) {
  ensure_sodium();
  const std::string material = "splitchain-key|" + owner + "|" + std::to_string(seed);
  std::array<std::uint8_t, crypto_box_SEEDBYTES> key_seed{};
  static_assert(crypto_box_SEEDBYTES == crypto_hash_sha256_BYTES);
  crypto_hash_sha256(key_seed.data(), reinterpret_cast<const unsigned char*>(material.data()), material.size());
  KeyPair kp;
  kp.owner = owner;
  kp.public_key.resize(crypto_box_PUBLICKEYBYTES);
  kp.private_key.resize(crypto_box_SECRETKEYBYTES);
  crypto_box_seed_keypair(kp.public_key.data(), kp.private_key.data(), key_seed.data());
  sodium_memzero(key_seed.data(), key_seed.size());
  return kp;
}

std::string fingerprint(ByteView public_key) {
  const Bytes fp = fingerprint_bytes(public_key);
  return to_hex(fp.data(), fp.size());
}

Bytes SealedEnvelope::serialize() const {
  Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(version);
  put_field(out, recipient_fingerprint);
  put_field(out, ephemeral_public);
  put_field(out, nonce);
  put_field(out, ciphertext);
  put_field(out, tag);
  return out;
}

SealedEnvelope SealedEnvelope::parse(ByteView framed) {
  if (framed.size() < kMagic.size() + 1) fail(ErrorKind::Parse, "envelope too short");
  if (!std::equal(kMagic.begin(), kMagic.end(), framed.begin())) fail(ErrorKind::Parse, "not a sealed envelope");
  SealedEnvelope env;
  std::size_t pos = kMagic.size();
  env.version = framed[pos++];
  if (env.version != kEnvelopeVersion)
    fail(ErrorKind::Parse, "unsupported envelope version " + std::to_string(env.version));
  env.recipient_fingerprint = take_field(framed, pos);
  env.ephemeral_public = take_field(framed, pos);
  env.nonce = take_field(framed, pos);
  env.ciphertext = take_field(framed, pos);
  env.tag = take_field(framed, pos);
  if (pos != framed.size()) fail(ErrorKind::Parse, "trailing bytes after envelope");
  if (env.recipient_fingerprint.size() != crypto_hash_sha256_BYTES ||
      env.ephemeral_public.size() != crypto_box_PUBLICKEYBYTES || env.nonce.size() != crypto_box_NONCEBYTES ||
      env.tag.size() != crypto_box_MACBYTES)
    fail(ErrorKind::Parse, "envelope field has the wrong size");
  return env;
}

SealedEnvelope seal(ByteView plaintext, ByteView recipient_public) {
  ensure_sodium();
  if (plaintext.empty()) fail(ErrorKind::EmptyInput, "refusing to seal an empty payload");
  if (recipient_public.size() != crypto_box_PUBLICKEYBYTES)
    fail(ErrorKind::Key, "recipient public key must be " + std::to_string(crypto_box_PUBLICKEYBYTES) + " bytes");

  SealedEnvelope env;
  env.recipient_fingerprint = fingerprint_bytes(recipient_public);
  env.ephemeral_public.resize(crypto_box_PUBLICKEYBYTES);
  std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> ephemeral_secret{};
  crypto_box_keypair(env.ephemeral_public.data(), ephemeral_secret.data());
  env.nonce.resize(crypto_box_NONCEBYTES);
  randombytes_buf(env.nonce.data(), env.nonce.size());
  env.ciphertext.resize(plaintext.size());
  env.tag.resize(crypto_box_MACBYTES);
  const int rc = crypto_box_detached(env.ciphertext.data(), env.tag.data(), plaintext.data(), plaintext.size(),
                                     env.nonce.data(), recipient_public.data(), ephemeral_secret.data());
  sodium_memzero(ephemeral_secret.data(), ephemeral_secret.size());
  if (rc != 0) fail(ErrorKind::Key, "recipient public key rejected");
  return env;
}

Bytes open(const SealedEnvelope& envelope, ByteView private_key) {
  ensure_sodium();
  if (private_key.size() != crypto_box_SECRETKEYBYTES) fail(ErrorKind::Key, "private key has the wrong size");
  if (envelope.version != kEnvelopeVersion || envelope.ephemeral_public.size() != crypto_box_PUBLICKEYBYTES ||
      envelope.nonce.size() != crypto_box_NONCEBYTES || envelope.tag.size() != crypto_box_MACBYTES)
    fail(ErrorKind::Parse, "malformed envelope");

  Bytes own_public(crypto_box_PUBLICKEYBYTES);
  crypto_scalarmult_base(own_public.data(), private_key.data());
  if (fingerprint_bytes(own_public) != envelope.recipient_fingerprint) auth_failure();

  Bytes plaintext(envelope.ciphertext.size());
  if (crypto_box_open_detached(plaintext.data(), envelope.ciphertext.data(), envelope.tag.data(),
                               envelope.ciphertext.size(), envelope.nonce.data(), envelope.ephemeral_public.data(),
                               private_key.data()) != 0)
    auth_failure();
  return plaintext;
}

void KeyDirectory::add(const std::string& id, Bytes public_key) {
  if (public_key.size() != crypto_box_PUBLICKEYBYTES) fail(ErrorKind::Key, "malformed public key for " + id);
  keys_[id] = std::move(public_key);
}

const Bytes& KeyDirectory::public_key(const std::string& id) const {
  auto it = keys_.find(id);
  if (it == keys_.end()) fail(ErrorKind::Key, "no public key known for '" + id + "'");
  return it->second;
}

std::string KeyDirectory::serialize() const {
  std::string out;
  for (const auto& [id, pk] : keys_) out += id + ' ' + to_hex(pk.data(), pk.size()) + '\n';
  return out;
}

KeyDirectory KeyDirectory::deserialize(const std::string& text) {
  KeyDirectory dir;
  std::istringstream in(text);
  std::string id, hex;
  while (in >> id >> hex) {
    auto raw = from_hex(hex);
    if (!raw) fail(ErrorKind::Parse, "bad public key hex for " + id);
    dir.add(id, to_bytes(*raw));
  }
  return dir;
}

void KeyDirectory::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << serialize();
}

KeyDirectory KeyDirectory::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::State, "public key directory missing: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace splitchain
