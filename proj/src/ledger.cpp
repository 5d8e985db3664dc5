#include "splitchain/ledger.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "splitchain/error.hpp"
#include "splitchain/numeric_text.hpp"

namespace splitchain {

namespace {

void check_field(const std::string& value, const char* what) {
  if (value.empty()) fail(ErrorKind::Config, std::string(what) + " must not be empty");
  if (value.find_first_of("|\r\n") != std::string::npos)
    fail(ErrorKind::Config, std::string(what) + " must not contain '|' or line breaks: " + value);
}

// flock-held file descriptor; released on scope exit.
class LockedFile {
 public:
  LockedFile(const std::filesystem::path& path, int lock_op) {
    fd_ = ::open(path.c_str(), O_RDWR | O_APPEND | O_CREAT, 0644);
    if (fd_ < 0) fail(ErrorKind::Io, "cannot open ledger journal " + path.string());
    if (::flock(fd_, lock_op) != 0) {
      ::close(fd_);
      fail(ErrorKind::Io, "cannot lock ledger journal " + path.string());
    }
  }
  ~LockedFile() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockedFile(const LockedFile&) = delete;
  LockedFile& operator=(const LockedFile&) = delete;

  std::string read_from(std::uintmax_t offset) const {
    std::string out;
    char buf[8192];
    auto pos = static_cast<off_t>(offset);
    for (;;) {
      ssize_t n = ::pread(fd_, buf, sizeof buf, pos);
      if (n < 0) fail(ErrorKind::Io, "ledger journal read failed");
      if (n == 0) break;
      out.append(buf, static_cast<std::size_t>(n));
      pos += n;
    }
    return out;
  }

  void append(const std::string& text) const {
    std::size_t done = 0;
    while (done < text.size()) {
      ssize_t n = ::write(fd_, text.data() + done, text.size() - done);
      if (n < 0) fail(ErrorKind::Io, "ledger journal append failed");
      done += static_cast<std::size_t>(n);
    }
    ::fsync(fd_);
  }

 private:
  int fd_ = -1;
};

}  // namespace

std::string LedgerEntry::to_line() const {
  return std::to_string(seq) + '|' + timestamp + '|' + sender + '|' + recipient + '|' + tag + '|' + hash.hex();
}

LedgerEntry LedgerEntry::parse_line(std::string_view line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == '|') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 6) fail(ErrorKind::Parse, "ledger line needs 6 fields: " + std::string(line));
  auto seq = parse_int(parts[0]);
  if (!seq || *seq < 1) fail(ErrorKind::Parse, "bad ledger sequence number '" + parts[0] + "'");
  LedgerEntry e;
  e.seq = static_cast<std::uint64_t>(*seq);
  e.timestamp = parts[1];
  e.sender = parts[2];
  e.recipient = parts[3];
  e.tag = parts[4];
  e.hash = ContentHash::from_hex(parts[5]);
  return e;
}

bool LedgerFilter::matches(const LedgerEntry& e) const {
  if (sender && e.sender != *sender) return false;
  if (recipient && e.recipient != *recipient) return false;
  if (tag && e.tag != *tag) return false;
  if (tag_prefix && e.tag.rfind(*tag_prefix, 0) != 0) return false;
  return true;
}

Ledger::Ledger() : clock_(&Ledger::utc_now_iso8601) {}

Ledger::Ledger(std::filesystem::path journal) : journal_(std::move(journal)), clock_(&Ledger::utc_now_iso8601) {
  if (journal_->has_parent_path()) std::filesystem::create_directories(journal_->parent_path());
  std::lock_guard lock(mu_);
  sync_locked();
}

void Ledger::set_clock(Clock clock) {
  std::lock_guard lock(mu_);
  clock_ = std::move(clock);
}

void Ledger::register_participant(const std::string& id) {
  check_field(id, "participant id");
  std::lock_guard lock(mu_);
  participants_.insert(id);
}

bool Ledger::is_participant(const std::string& id) const {
  std::lock_guard lock(mu_);
  return participants_.count(id) != 0;
}

void Ledger::ingest_line_locked(const std::string& line) const {
  LedgerEntry e = LedgerEntry::parse_line(line);
  const std::uint64_t expected = entries_.empty() ? 1 : entries_.back().seq + 1;
  if (e.seq != expected)
    fail(ErrorKind::Integrity, "ledger journal out of sequence: expected " + std::to_string(expected) + ", found " +
                                   std::to_string(e.seq));
  entries_.push_back(std::move(e));
}

void Ledger::sync_locked() const {
  if (!journal_) return;
  LockedFile file(*journal_, LOCK_SH);
  const std::string tail = file.read_from(journal_offset_);
  std::size_t start = 0;
  while (start < tail.size()) {
    const auto nl = tail.find('\n', start);
    if (nl == std::string::npos) break;  // partial line from an in-flight writer
    const std::string line = tail.substr(start, nl - start);
    if (!line.empty()) ingest_line_locked(line);
    start = nl + 1;
  }
  journal_offset_ += start;
}

std::uint64_t Ledger::register_hash(const std::string& sender, const std::string& recipient, const std::string& tag,
                                    const ContentHash& hash) {
  check_field(sender, "sender");
  check_field(recipient, "recipient");
  check_field(tag, "tag");
  std::lock_guard lock(mu_);
  if (!participants_.count(sender)) fail(ErrorKind::Authorization, "sender '" + sender + "' is not a registered participant");
  if (!participants_.count(recipient))
    fail(ErrorKind::Authorization, "recipient '" + recipient + "' is not a registered participant");

  LedgerEntry e{0, clock_(), sender, recipient, tag, hash};
  if (journal_) {
    LockedFile file(*journal_, LOCK_EX);
    const std::string tail = file.read_from(journal_offset_);
    std::size_t start = 0;
    while (start < tail.size()) {
      const auto nl = tail.find('\n', start);
      if (nl == std::string::npos) fail(ErrorKind::Integrity, "ledger journal ends with a partial line");
      const std::string line = tail.substr(start, nl - start);
      if (!line.empty()) ingest_line_locked(line);
      start = nl + 1;
    }
    journal_offset_ += start;
    e.seq = entries_.empty() ? 1 : entries_.back().seq + 1;
    const std::string line = e.to_line() + '\n';
    file.append(line);
    journal_offset_ += line.size();
  } else {
    e.seq = entries_.empty() ? 1 : entries_.back().seq + 1;
  }
  entries_.push_back(e);
  return e.seq;
}

ContentHash Ledger::fetch_hash(const std::string& recipient, const std::string& sender, const std::string& tag) const {
  std::lock_guard lock(mu_);
  sync_locked();
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->recipient == recipient && it->sender == sender && it->tag == tag) return it->hash;
  fail(ErrorKind::NotFound, "no ledger entry from '" + sender + "' to '" + recipient + "' tagged '" + tag + "'");
}

std::vector<LedgerEntry> Ledger::history(const LedgerFilter& filter) const {
  std::lock_guard lock(mu_);
  sync_locked();
  std::vector<LedgerEntry> out;
  for (const auto& e : entries_)
    if (filter.matches(e)) out.push_back(e);
  return out;
}

std::string Ledger::serialized() const {
  std::lock_guard lock(mu_);
  sync_locked();
  std::string out;
  for (const auto& e : entries_) out += e.to_line() + '\n';
  return out;
}

std::string Ledger::utc_now_iso8601() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char frac[8];
  std::snprintf(frac, sizeof frac, ".%03dZ", static_cast<int>(ms));
  return std::string(buf) + frac;
}

}  // namespace splitchain
