#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>

#include "dwarfs/datagen/sequence.hpp"
#include "dwarfs/kernels/digest.hpp"
#include "dwarfs/kernels/result.hpp"

namespace dwarfs::kernels {

/// Incremental MD5 (RFC 1321).
class Md5 {
 public:
  Md5();
  Md5& update(std::span<const std::byte> data);
  Md5& update(std::string_view data) { return update(std::as_bytes(std::span(data.data(), data.size()))); }
  /// Pads and returns the digest; the object must not be updated afterwards.
  Digest128 finish();

  static Digest128 of(std::string_view data) { return Md5().update(data).finish(); }

 private:
  void block(const std::uint8_t* p);

  std::array<std::uint32_t, 4> state_;
  std::array<std::uint8_t, 64> buffer_{};
  std::uint64_t length_ = 0;
  std::size_t buffered_ = 0;
};

/// XOR of the MD5 digests of every record's value bytes.
Digest128 md5_fold(std::span<const datagen::SequenceRecord> records, std::size_t threads);

/// Logic dwarf: per-record MD5 over a sequence file, folded by XOR.
/// Summary: records.
KernelResult md5(const std::filesystem::path& sequence_file, std::size_t threads);

}  // namespace dwarfs::kernels
