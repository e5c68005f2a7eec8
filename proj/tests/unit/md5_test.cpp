#include <gtest/gtest.h>

#include <random>

#include "dwarfs/common/error.hpp"
#include "dwarfs/kernels/md5.hpp"
#include "support/md5_vectors.hpp"
#include "support/openssl_md5.hpp"
#include "support/temp_dir.hpp"

namespace dwarfs::kernels {
namespace {

using dwarfs::testing::TempDir;

TEST(Md5, Rfc1321Vectors) {
  for (const auto& [input, hex] : dwarfs::testing::kRfc1321Vectors) EXPECT_EQ(Md5::of(input).hex(), hex) << input;
}

TEST(Md5, IncrementalEqualsOneShotAcrossSplits) {
  std::string data(1000, '\0');
  std::mt19937 rng(1);
  for (auto& c : data) c = static_cast<char>(rng());
  const auto whole = Md5::of(data);
  for (std::size_t split : {0, 1, 55, 56, 63, 64, 65, 127, 999}) {
    Md5 m;
    m.update(std::string_view(data).substr(0, split));
    m.update(std::string_view(data).substr(split));
    EXPECT_EQ(m.finish(), whole) << split;
  }
}

TEST(Md5, AgreesWithOpenSsl) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    std::string s(rng() % 300, '\0');
    for (auto& c : s) c = static_cast<char>(rng());
    const auto ref = dwarfs::testing::openssl_md5(s);
    EXPECT_TRUE(std::equal(ref.begin(), ref.end(), Md5::of(s).bytes.begin()));
  }
}

TEST(Md5Kernel, FoldIsXorOfRecordDigestsAndThreadInvariant) {
  TempDir dir;
  std::vector<datagen::SequenceRecord> records;
  std::mt19937_64 rng(3);
  {
    datagen::SequenceWriter w(dir / "s.seq");
    for (int i = 0; i < 1000; ++i) {
      std::string v(rng() % 100, '\0');
      for (auto& c : v) c = static_cast<char>('a' + rng() % 26);
      records.push_back({datagen::line_key(i), v});
      w.write(records.back());
    }
    w.close();
  }
  std::array<unsigned char, 16> expected{};
  for (const auto& r : records) {
    const auto d = dwarfs::testing::openssl_md5(r.value);
    for (int b = 0; b < 16; ++b) expected[b] ^= d[b];
  }
  for (std::size_t t : {1, 2, 4, 8}) {
    const auto res = md5(dir / "s.seq", t);
    EXPECT_TRUE(std::equal(expected.begin(), expected.end(), res.output_digest.bytes.begin())) << t;
    EXPECT_EQ(res.output_summary.at("records"), 1000.0);
    EXPECT_EQ(res.kind, DwarfKind::md5);
  }
}

TEST(Md5Kernel, SingleEmptyValue) {
  TempDir dir;
  datagen::SequenceWriter w(dir / "s.seq");
  w.write({datagen::line_key(0), ""});
  w.close();
  EXPECT_EQ(md5(dir / "s.seq", 2).output_digest.hex(), "d41d8cd98f00b204e9800998ecf8427e");
}

TEST(Md5Kernel, MalformedRecordIsAnError) {
  TempDir dir;
  dwarfs::testing::write_file(dir / "bad.seq", std::string("DDSQ\x01\x08\x00\x00\x00", 9));
  EXPECT_THROW(md5(dir / "bad.seq", 1), FormatError);
}

TEST(Digest128, HexRoundTrip) {
  const auto d = Md5::of("abc");
  EXPECT_EQ(Digest128::from_hex(d.hex()), d);
  EXPECT_THROW(Digest128::from_hex("zz"), FormatError);
}

}  // namespace
}  // namespace dwarfs::kernels
