#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>

#include "dwarfs/kernels/md5.hpp"

namespace dwarfs::kernels::detail {

/// MD5 over u64-LE dimensions followed by raw little-endian element bytes.
template <class T>
Digest128 digest_array(std::initializer_list<std::uint64_t> dims, std::span<const T> values) {
  static_assert(std::endian::native == std::endian::little, "digest assumes a little-endian host");
  Md5 md5;
  for (std::uint64_t d : dims) md5.update(std::as_bytes(std::span(&d, 1)));
  md5.update(std::as_bytes(values));
  return md5.finish();
}

}  // namespace dwarfs::kernels::detail
