#include "splitchain/content_store.hpp"

#include <sodium.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <iterator>
#include <thread>

#include "splitchain/error.hpp"
#include "splitchain/numeric_text.hpp"

namespace splitchain {

void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) fail(ErrorKind::Key, "libsodium failed to initialise");
}

ContentHash ContentHash::of(ByteView payload) {
  ensure_sodium();
  ContentHash h;
  crypto_hash_sha256(h.digest.data(), payload.data(), payload.size());
  return h;
}

ContentHash ContentHash::from_hex(std::string_view hex) {
  auto raw = splitchain::from_hex(hex);
  if (!raw || raw->size() != 32) fail(ErrorKind::Parse, "content hash must be 64 hex digits: '" + std::string(hex) + "'");
  ContentHash h;
  std::copy(raw->begin(), raw->end(), h.digest.begin());
  return h;
}

std::string ContentHash::hex() const { return to_hex(digest.data(), digest.size()); }

namespace {

void reject_empty(ByteView payload) {
  if (payload.empty()) fail(ErrorKind::EmptyInput, "refusing to store an empty payload");
}

void verify(const ContentHash& expected, const Bytes& bytes) {
  if (ContentHash::of(bytes) != expected)
    fail(ErrorKind::Integrity, "stored bytes do not hash to " + expected.hex());
}

}  // namespace

ContentHash MemoryContentStore::put(ByteView payload) {
  reject_empty(payload);
  ContentHash h = ContentHash::of(payload);
  std::lock_guard lock(mu_);
  blobs_.try_emplace(h, payload.begin(), payload.end());
  return h;
}

Bytes MemoryContentStore::get(const ContentHash& hash) const {
  Bytes copy;
  {
    std::lock_guard lock(mu_);
    auto it = blobs_.find(hash);
    if (it == blobs_.end()) fail(ErrorKind::NotFound, "no blob with hash " + hash.hex());
    copy = it->second;
  }
  verify(hash, copy);
  return copy;
}

bool MemoryContentStore::contains(const ContentHash& hash) const {
  std::lock_guard lock(mu_);
  return blobs_.count(hash) != 0;
}

std::size_t MemoryContentStore::size() const {
  std::lock_guard lock(mu_);
  return blobs_.size();
}

void MemoryContentStore::corrupt_for_testing(const ContentHash& hash, std::size_t byte_index) {
  std::lock_guard lock(mu_);
  auto& blob = blobs_.at(hash);
  blob.at(byte_index) ^= 0x01;
}

DirectoryContentStore::DirectoryContentStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) fail(ErrorKind::Io, "cannot create store root " + root_.string() + ": " + ec.message());
}

std::filesystem::path DirectoryContentStore::blob_path(const ContentHash& hash) const {
  const std::string hex = hash.hex();
  return root_ / hex.substr(0, 2) / (hex + ".blob");
}

ContentHash DirectoryContentStore::put(ByteView payload) {
  reject_empty(payload);
  const ContentHash h = ContentHash::of(payload);
  const auto target = blob_path(h);
  if (std::filesystem::exists(target)) return h;

  std::error_code ec;
  std::filesystem::create_directories(target.parent_path(), ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + target.parent_path().string() + ": " + ec.message());

  static std::atomic<unsigned long> counter{0};
  const auto tmp = target.parent_path() /
                   ("." + h.hex() + "." + std::to_string(::getpid()) + "." +
                    std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                    std::to_string(counter++) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed for " + tmp.string());
  }
  // Same bytes under the same name, so a concurrent rename of an identical
  // blob is harmless.
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorKind::Io, "cannot publish blob " + target.string() + ": " + ec.message());
  }
  return h;
}

Bytes DirectoryContentStore::get(const ContentHash& hash) const {
  const auto path = blob_path(hash);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::NotFound, "no blob with hash " + hash.hex());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  verify(hash, bytes);
  return bytes;
}

bool DirectoryContentStore::contains(const ContentHash& hash) const {
  return std::filesystem::exists(blob_path(hash));
}

std::size_t DirectoryContentStore::size() const {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root_))
    if (entry.is_regular_file() && entry.path().extension() == ".blob") ++count;
  return count;
}

}  // namespace splitchain
