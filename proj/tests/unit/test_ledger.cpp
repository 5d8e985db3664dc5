#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "splitchain/error.hpp"
#include "splitchain/ledger.hpp"

using namespace splitchain;

namespace {

ContentHash h(const std::string& s) { return ContentHash::of(to_bytes(s)); }

Ledger& with_parties(Ledger& l) {
  for (const char* p : {"node1", "node2", "host"}) l.register_participant(p);
  l.set_clock([] { return std::string("2026-01-01T00:00:00.000Z"); });
  return l;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("register and fetch, latest registration wins") {
  Ledger l;
  with_parties(l);
  CHECK(l.register_hash("node1", "host", "r/train-repr", h("a")) == 1);
  CHECK(l.register_hash("node2", "host", "r/train-repr", h("b")) == 2);
  CHECK(l.fetch_hash("host", "node1", "r/train-repr") == h("a"));
  CHECK(l.register_hash("node1", "host", "r/train-repr", h("c")) == 3);
  CHECK(l.fetch_hash("host", "node1", "r/train-repr") == h("c"));
  CHECK(l.history().size() == 3);
  CHECK(l.history()[0].hash == h("a"));

  LedgerFilter f;
  f.sender = "node2";
  CHECK(l.history(f).size() == 1);
  f = {};
  f.tag_prefix = "r/";
  CHECK(l.history(f).size() == 3);
}

TEST_CASE("ledger rejects bad registrations") {
  Ledger l;
  with_parties(l);
  auto kind = [&](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::State;
  };
  CHECK(kind([&] { l.register_hash("mallory", "host", "t", h("x")); }) == ErrorKind::Authorization);
  CHECK(kind([&] { l.register_hash("node1", "nobody", "t", h("x")); }) == ErrorKind::Authorization);
  CHECK(kind([&] { l.register_hash("node1", "host", "", h("x")); }) == ErrorKind::Config);
  CHECK(kind([&] { l.register_hash("node1", "host", "a|b", h("x")); }) == ErrorKind::Config);
  CHECK(kind([&] { l.register_hash("node1", "host", "a\nb", h("x")); }) == ErrorKind::Config);
  CHECK(kind([&] { l.fetch_hash("host", "node1", "missing"); }) == ErrorKind::NotFound);
  l.register_hash("node1", "host", "t", h("x"));
  CHECK(kind([&] { l.fetch_hash("node2", "node1", "t"); }) == ErrorKind::NotFound);
  CHECK(l.history().size() == 1);
}

TEST_CASE("journal line format round-trips") {
  LedgerEntry e{7, "2026-01-01T00:00:00.000Z", "node1", "host", "run/test-repr", h("q")};
  const std::string line = e.to_line();
  CHECK(line == "7|2026-01-01T00:00:00.000Z|node1|host|run/test-repr|" + h("q").hex());
  const auto back = LedgerEntry::parse_line(line);
  CHECK(back.seq == 7);
  CHECK(back.tag == e.tag);
  CHECK(back.hash == e.hash);
  CHECK_THROWS_AS(LedgerEntry::parse_line("1|x|y"), Error);
}

TEST_CASE("journal is append-only and replayed on open") {
  testing::TempDir dir("ledger");
  const auto path = dir / "ledger.journal";
  std::string before;
  {
    Ledger l(path);
    with_parties(l);
    l.register_hash("node1", "host", "a/train-repr", h("1"));
    l.register_hash("node2", "host", "a/train-repr", h("2"));
    before = slurp(path);
  }
  {
    Ledger l(path);
    with_parties(l);
    CHECK(l.history().size() == 2);
    CHECK(l.fetch_hash("host", "node2", "a/train-repr") == h("2"));
    CHECK(l.register_hash("node1", "host", "b/train-repr", h("3")) == 3);
  }
  const std::string after = slurp(path);
  CHECK(after.substr(0, before.size()) == before);
  CHECK(after.size() > before.size());
}

TEST_CASE("two handles on one journal see each other's entries") {
  testing::TempDir dir("ledger");
  const auto path = dir / "ledger.journal";
  Ledger a(path), b(path);
  with_parties(a);
  with_parties(b);
  CHECK(a.register_hash("node1", "host", "t", h("1")) == 1);
  CHECK(b.register_hash("node2", "host", "t", h("2")) == 2);
  CHECK(a.fetch_hash("host", "node2", "t") == h("2"));
  CHECK(a.history().size() == 2);
}

TEST_CASE("a tampered journal is refused") {
  testing::TempDir dir("ledger");
  const auto path = dir / "ledger.journal";
  {
    Ledger l(path);
    with_parties(l);
    l.register_hash("node1", "host", "t", h("1"));
    l.register_hash("node1", "host", "t", h("2"));
  }
  std::string text = slurp(path);
  text.replace(text.find("\n2|") + 1, 1, "5");
  std::ofstream(path, std::ios::trunc) << text;
  try {
    Ledger l(path);
    FAIL("tampered journal accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Integrity);
  }
}

TEST_CASE("timestamps are iso-8601 utc") {
  const std::string ts = Ledger::utc_now_iso8601();
  CHECK(ts.size() == 24);
  CHECK(ts[4] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts.back() == 'Z');
}
