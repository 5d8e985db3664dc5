#pragma once

// Content-addressed blob store standing in for IPFS: the address of a
// payload is the SHA-256 of its bytes. There is no delete or overwrite.

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "splitchain/bytes.hpp"

namespace splitchain {

struct ContentHash {
  std::array<std::uint8_t, 32> digest{};

  static ContentHash of(ByteView payload);
  static ContentHash from_hex(std::string_view hex);
  std::string hex() const;

  auto operator<=>(const ContentHash&) const = default;
};

class ContentStore {
 public:
  virtual ~ContentStore() = default;

  // Stores the payload (idempotent) and returns its address.
  virtual ContentHash put(ByteView payload) = 0;
  // Returns the stored bytes after re-hashing them against the address.
  virtual Bytes get(const ContentHash& hash) const = 0;
  virtual bool contains(const ContentHash& hash) const = 0;
  virtual std::size_t size() const = 0;
};

class MemoryContentStore final : public ContentStore {
 public:
  ContentHash put(ByteView payload) override;
  Bytes get(const ContentHash& hash) const override;
  bool contains(const ContentHash& hash) const override;
  std::size_t size() const override;

  // Test hook for corruption scenarios.
  void corrupt_for_testing(const ContentHash& hash, std::size_t byte_index);

 private:
  mutable std::mutex mu_;
  std::map<ContentHash, Bytes> blobs_;
};

// Layout: <root>/<first-2-hex>/<digest>.blob, written temp-then-rename.
class DirectoryContentStore final : public ContentStore {
 public:
  explicit DirectoryContentStore(std::filesystem::path root);

  ContentHash put(ByteView payload) override;
  Bytes get(const ContentHash& hash) const override;
  bool contains(const ContentHash& hash) const override;
  std::size_t size() const override;

  std::filesystem::path blob_path(const ContentHash& hash) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace splitchain
