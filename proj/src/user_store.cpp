#include "rcph/user_store.hpp"

#include <cstdio>
#include <filesystem>
#include <mutex>

#include <unistd.h>

#include "rcph/byte_io.hpp"

namespace rcph {

namespace {
constexpr std::string_view kMagic = "USTR";
constexpr std::uint16_t kVersion = 1;
constexpr std::uint32_t kMaxVerifierBytes = 1024;

std::vector<std::uint8_t> encode_record(const UserRecord& record) {
  bytes::Writer w;
  w.raw(record.public_id.bytes);
  const auto v = record.verifier.to_bytes_be();
  w.u32(static_cast<std::uint32_t>(v.size()));
  w.raw(v);
  return std::move(w).take();
}

}  // namespace

UserStore::UserStore(std::string path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) {
    bytes::Writer w;
    w.raw(kMagic);
    w.u16(kVersion);
    bytes::write_file(path_, w.data());
    return;
  }
  const auto data = bytes::read_file(path_);
  bytes::Reader r(data, "user store '" + path_ + "'");
  r.expect_magic(kMagic);
  if (auto v = r.u16(); v != kVersion) throw DataError("user store: unsupported version " + std::to_string(v));
  while (!r.at_end()) {
    Digest id;
    auto raw = r.raw(id.bytes.size());
    std::copy(raw.begin(), raw.end(), id.bytes.begin());
    const std::uint32_t len = r.u32();
    if (len > kMaxVerifierBytes) throw DataError("user store: oversized verifier");
    BigInt verifier = BigInt::from_bytes_be(r.raw(len));
    if (!users_.emplace(id, std::move(verifier)).second) {
      throw DataError("user store: duplicate public id " + id.hex());
    }
  }
}

void UserStore::append_to_file(const UserRecord& record) {
  const auto bytes = encode_record(record);
  std::FILE* f = std::fopen(path_.c_str(), "ab");
  if (f == nullptr) throw DataError("cannot append to user store '" + path_ + "'");
  const bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size() && std::fflush(f) == 0 &&
                  ::fsync(::fileno(f)) == 0;
  std::fclose(f);
  if (!ok) throw DataError("write to user store '" + path_ + "' failed");
}

void UserStore::register_user(const UserRecord& record) {
  std::unique_lock lock(mutex_);
  if (users_.contains(record.public_id)) {
    throw DuplicateUserError("public id already registered: " + record.public_id.hex());
  }
  if (!path_.empty()) append_to_file(record);
  users_.emplace(record.public_id, record.verifier);
}

std::optional<UserRecord> UserStore::lookup(const Digest& public_id) const {
  std::shared_lock lock(mutex_);
  const auto it = users_.find(public_id);
  if (it == users_.end()) return std::nullopt;
  return UserRecord{it->first, it->second};
}

std::size_t UserStore::size() const {
  std::shared_lock lock(mutex_);
  return users_.size();
}

}  // namespace rcph
