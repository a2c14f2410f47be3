#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcph/zkp.hpp"

namespace rcph {

class DuplicateUserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Registered users keyed by public id. When backed by a file, every
/// registration is appended and flushed before register_user returns:
///
///   "USTR", version u16 = 1, then records of
///   public_id (32 bytes), verifier length u32 LE, verifier big-endian bytes.
///
/// Concurrent lookups are allowed; registrations are serialized.
class UserStore {
 public:
  /// In-memory store.
  UserStore() = default;
  /// Loads (or creates) the record file at path. Throws DataError on corruption.
  explicit UserStore(std::string path);

  /// Throws DuplicateUserError if public_id is taken.
  void register_user(const UserRecord& record);
  std::optional<UserRecord> lookup(const Digest& public_id) const;
  std::size_t size() const;
  const std::string& path() const noexcept { return path_; }

 private:
  void append_to_file(const UserRecord& record);

  std::string path_;
  mutable std::shared_mutex mutex_;
  std::map<Digest, BigInt> users_;
};

}  // namespace rcph
