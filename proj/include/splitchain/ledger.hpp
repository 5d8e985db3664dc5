#pragma once

// Hash registry standing in for the smart contract: an append-only log of
// (sender, recipient, tag) -> content hash registrations. Later entries under
// the same key supersede earlier ones for fetch; nothing is ever rewritten.
//
// Journal line format: seq|iso8601|sender|recipient|tag|hex-hash

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "splitchain/content_store.hpp"

namespace splitchain {

struct LedgerEntry {
  std::uint64_t seq = 0;
  std::string timestamp;
  std::string sender;
  std::string recipient;
  std::string tag;
  ContentHash hash;

  std::string to_line() const;
  static LedgerEntry parse_line(std::string_view line);
};

struct LedgerFilter {
  std::optional<std::string> sender;
  std::optional<std::string> recipient;
  std::optional<std::string> tag;
  std::optional<std::string> tag_prefix;

  bool matches(const LedgerEntry& e) const;
};

class Ledger {
 public:
  using Clock = std::function<std::string()>;

  // In-memory ledger.
  Ledger();
  // Journal-backed ledger; existing entries are replayed and verified.
  explicit Ledger(std::filesystem::path journal);

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  void set_clock(Clock clock);

  void register_participant(const std::string& id);
  bool is_participant(const std::string& id) const;

  std::uint64_t register_hash(const std::string& sender, const std::string& recipient, const std::string& tag,
                              const ContentHash& hash);
  ContentHash fetch_hash(const std::string& recipient, const std::string& sender, const std::string& tag) const;
  std::vector<LedgerEntry> history(const LedgerFilter& filter = {}) const;

  // All entries rendered as journal lines.
  std::string serialized() const;
  const std::optional<std::filesystem::path>& journal_path() const { return journal_; }

  static std::string utc_now_iso8601();

 private:
  void sync_locked() const;  // pulls entries appended by other processes
  void ingest_line_locked(const std::string& line) const;

  mutable std::mutex mu_;
  std::optional<std::filesystem::path> journal_;
  mutable std::vector<LedgerEntry> entries_;
  mutable std::uintmax_t journal_offset_ = 0;
  std::set<std::string> participants_;
  Clock clock_;
};

}  // namespace splitchain
