#include <doctest.h>

#include "support.hpp"
#include "splitchain/envelope.hpp"
#include "splitchain/error.hpp"
#include "splitchain/numeric_text.hpp"

using namespace splitchain;

namespace {

ErrorKind open_error(const Bytes& framed, const Bytes& key) {
  try {
    open(SealedEnvelope::parse(framed), key);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::State;
}

}  // namespace

TEST_CASE("keygen is deterministic per owner and seed") {
  const auto a = keygen("node1", 5);
  CHECK(a.public_key == keygen("node1", 5).public_key);
  CHECK(a.public_key != keygen("node2", 5).public_key);
  CHECK(a.public_key != keygen("node1", 6).public_key);
  CHECK(a.public_key.size() == 32);
  CHECK(fingerprint(a.public_key).size() == 64);
}

TEST_CASE("seal/open round trip") {
  const auto host = keygen("host", 1);
  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    const Bytes p = testing::random_payload(rng, 4000);
    const Bytes framed = seal(p, host.public_key).serialize();
    CHECK(open(SealedEnvelope::parse(framed), host.private_key) == p);
  }
  const Bytes p = to_bytes("same payload");
  CHECK(seal(p, host.public_key).serialize() != seal(p, host.public_key).serialize());
  CHECK_THROWS_AS(seal(Bytes{}, host.public_key), Error);
  CHECK_THROWS_AS(seal(p, Bytes(5, 1)), Error);
}

TEST_CASE("wrong key and tampering are both authentication failures") {
  const auto host = keygen("host", 1);
  const auto node2 = keygen("node2", 1);
  const Bytes framed = seal(to_bytes("secret representation"), host.public_key).serialize();
  CHECK(open_error(framed, node2.private_key) == ErrorKind::Authentication);

  // A forged fingerprint does not help the wrong key either.
  auto env = SealedEnvelope::parse(framed);
  const auto fp = from_hex(fingerprint(node2.public_key));
  env.recipient_fingerprint.assign(fp->begin(), fp->end());
  CHECK_THROWS_AS(open(env, node2.private_key), Error);

  // Flip one bit in each byte of the ciphertext/tag region.
  const std::size_t header = framed.size() - SealedEnvelope::parse(framed).ciphertext.size() - 4 - 16;
  for (std::size_t i = header; i < framed.size(); ++i) {
    Bytes bad = framed;
    bad[i] ^= 0x01;
    const auto k = open_error(bad, host.private_key);
    CHECK((k == ErrorKind::Authentication || k == ErrorKind::Parse));
  }
}

TEST_CASE("framing errors are parse errors") {
  const auto host = keygen("host", 1);
  const Bytes framed = seal(to_bytes("x"), host.public_key).serialize();
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{10}, framed.size() - 1}) {
    try {
      SealedEnvelope::parse(ByteView(framed.data(), cut));
      FAIL("truncated envelope parsed");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
    }
  }
  Bytes trailing = framed;
  trailing.push_back(0);
  CHECK_THROWS_AS(SealedEnvelope::parse(trailing), Error);
  Bytes version = framed;
  version[4] = 9;
  CHECK_THROWS_AS(SealedEnvelope::parse(version), Error);
}

TEST_CASE("key directory") {
  KeyDirectory dir;
  dir.add("node1", keygen("node1", 3).public_key);
  dir.add("host", keygen("host", 3).public_key);
  const auto back = KeyDirectory::deserialize(dir.serialize());
  CHECK(back.public_key("host") == dir.public_key("host"));
  try {
    back.public_key("node9");
    FAIL("unknown key returned");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Key);
  }
  testing::TempDir tmp("keys");
  dir.save(tmp / "k.txt");
  CHECK(KeyDirectory::load(tmp / "k.txt").contains("node1"));
}
