#include "dwarfs/kernels/md5.hpp"

#include <cstring>

#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"

namespace dwarfs::kernels {

namespace {

constexpr std::array<std::uint32_t, 64> kSine = {
    0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf, 0x4787c62a, 0xa8304613, 0xfd469501,
    0x698098d8, 0x8b44f7af, 0xffff5bb1, 0x895cd7be, 0x6b901122, 0xfd987193, 0xa679438e, 0x49b40821,
    0xf61e2562, 0xc040b340, 0x265e5a51, 0xe9b6c7aa, 0xd62f105d, 0x02441453, 0xd8a1e681, 0xe7d3fbc8,
    0x21e1cde6, 0xc33707d6, 0xf4d50d87, 0x455a14ed, 0xa9e3e905, 0xfcefa3f8, 0x676f02d9, 0x8d2a4c8a,
    0xfffa3942, 0x8771f681, 0x6d9d6122, 0xfde5380c, 0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70,
    0x289b7ec6, 0xeaa127fa, 0xd4ef3085, 0x04881d05, 0xd9d4d039, 0xe6db99e5, 0x1fa27cf8, 0xc4ac5665,
    0xf4292244, 0x432aff97, 0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92, 0xffeff47d, 0x85845dd1,
    0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1, 0xf7537e82, 0xbd3af235, 0x2ad7d2bb, 0xeb86d391,
};

constexpr std::array<int, 64> kShift = {
    7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22,
    5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20,
    4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23,
    6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21,
};

constexpr std::uint32_t rotl(std::uint32_t x, int c) { return (x << c) | (x >> (32 - c)); }

}  // namespace

Md5::Md5() : state_{0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476} {}

void Md5::block(const std::uint8_t* p) {
  std::uint32_t m[16];
  for (int i = 0; i < 16; ++i)
    m[i] = std::uint32_t(p[4 * i]) | std::uint32_t(p[4 * i + 1]) << 8 |
           std::uint32_t(p[4 * i + 2]) << 16 | std::uint32_t(p[4 * i + 3]) << 24;

  std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
  for (int i = 0; i < 64; ++i) {
    std::uint32_t f;
    int g;
    if (i < 16) {
      f = (b & c) | (~b & d);
      g = i;
    } else if (i < 32) {
      f = (d & b) | (~d & c);
      g = (5 * i + 1) % 16;
    } else if (i < 48) {
      f = b ^ c ^ d;
      g = (3 * i + 5) % 16;
    } else {
      f = c ^ (b | ~d);
      g = (7 * i) % 16;
    }
    const std::uint32_t tmp = d;
    d = c;
    c = b;
    b = b + rotl(a + f + kSine[i] + m[g], kShift[i]);
    a = tmp;
  }
  state_[0] += a;
  state_[1] += b;
  state_[2] += c;
  state_[3] += d;
}

Md5& Md5::update(std::span<const std::byte> data) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(data.data());
  std::size_t n = data.size();
  length_ += n;
  if (buffered_ > 0) {
    const std::size_t take = std::min(n, 64 - buffered_);
    std::memcpy(buffer_.data() + buffered_, p, take);
    buffered_ += take;
    p += take;
    n -= take;
    if (buffered_ < 64) return *this;
    block(buffer_.data());
    buffered_ = 0;
  }
  for (; n >= 64; n -= 64, p += 64) block(p);
  std::memcpy(buffer_.data(), p, n);
  buffered_ = n;
  return *this;
}

Digest128 Md5::finish() {
  const std::uint64_t bit_length = length_ * 8;
  static constexpr std::uint8_t kPad[64] = {0x80};
  const std::size_t pad = buffered_ < 56 ? 56 - buffered_ : 120 - buffered_;
  update(std::as_bytes(std::span(kPad, pad)));
  std::uint8_t len[8];
  for (int i = 0; i < 8; ++i) len[i] = static_cast<std::uint8_t>(bit_length >> (8 * i));
  update(std::as_bytes(std::span(len, 8)));

  Digest128 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.bytes[4 * i + j] = static_cast<std::uint8_t>(state_[i] >> (8 * j));
  return out;
}

Digest128 md5_fold(std::span<const datagen::SequenceRecord> records, std::size_t threads) {
  std::vector<Digest128> partial(std::max<std::size_t>(1, threads));
  parallel_for(threads, records.size(), [&](Range r, std::size_t w) {
    for (std::size_t i = r.begin; i < r.end; ++i) partial[w] ^= Md5::of(records[i].value);
  });
  Digest128 folded;
  for (const auto& d : partial) folded ^= d;
  return folded;
}

KernelResult md5(const std::filesystem::path& sequence_file, std::size_t threads) {
  constexpr std::size_t kBatchBytes = std::size_t{64} << 20;
  Stopwatch clock;
  datagen::SequenceReader reader(sequence_file);
  Digest128 folded;
  std::uint64_t count = 0;
  std::vector<datagen::SequenceRecord> batch;
  std::size_t batch_bytes = 0;
  auto drain = [&] {
    folded ^= md5_fold(batch, threads);
    count += batch.size();
    batch.clear();
    batch_bytes = 0;
  };
  while (auto r = reader.next()) {
    batch_bytes += r->value.size() + 16;
    batch.push_back(std::move(*r));
    if (batch_bytes >= kBatchBytes) drain();
  }
  drain();
  return KernelResult{DwarfKind::md5, clock.seconds(), folded, {{"records", double(count)}}};
}

}  // namespace dwarfs::kernels
