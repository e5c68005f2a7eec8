#include "dwarfs/datagen/sequence.hpp"

#include "dwarfs/common/binio.hpp"
#include "dwarfs/common/error.hpp"

namespace dwarfs::datagen {

std::string line_key(std::uint64_t line) {
  std::string key(8, '\0');
  for (int i = 0; i < 8; ++i) key[i] = static_cast<char>((line >> (8 * i)) & 0xff);
  return key;
}

std::uint64_t decode_line_key(const std::string& key) {
  if (key.size() != 8) throw FormatError("sequence key is not 8 bytes");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(key[i]);
  return v;
}

SequenceWriter::SequenceWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("sequence: cannot open " + path.string() + " for writing");
  binio::write_magic(out_, kSequenceMagic, kSequenceVersion);
}

void SequenceWriter::write(const SequenceRecord& record) {
  if (record.key.size() > UINT32_MAX || record.value.size() > UINT32_MAX)
    throw InvalidArgument("sequence: record field exceeds 4 GiB");
  binio::write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(record.key.size()));
  out_.write(record.key.data(), static_cast<std::streamsize>(record.key.size()));
  binio::write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(record.value.size()));
  out_.write(record.value.data(), static_cast<std::streamsize>(record.value.size()));
  ++count_;
}

void SequenceWriter::close() {
  out_.flush();
  if (!out_) throw IoError("sequence: write failed");
  out_.close();
}

SequenceFile gen_sequence(const std::filesystem::path& corpus, const std::filesystem::path& out) {
  std::ifstream in(corpus, std::ios::binary);
  if (!in) throw IoError("gen_sequence: cannot read " + corpus.string());
  SequenceWriter writer(out);
  std::string line;
  std::uint64_t index = 0;
  while (std::getline(in, line)) writer.write({line_key(index++), line});
  if (in.bad()) throw IoError("gen_sequence: read failed for " + corpus.string());
  writer.close();
  return SequenceFile{out, index};
}

SequenceReader::SequenceReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw IoError("sequence: cannot read " + path.string());
  binio::expect_magic(in_, kSequenceMagic, kSequenceVersion);
}

std::optional<SequenceRecord> SequenceReader::next() {
  std::uint32_t key_len = 0;
  if (!binio::try_read_le(in_, key_len)) return std::nullopt;
  SequenceRecord r;
  r.key = binio::read_bytes(in_, key_len);
  const auto value_len = binio::read_le<std::uint32_t>(in_);
  r.value = binio::read_bytes(in_, value_len);
  return r;
}

std::vector<SequenceRecord> read_sequence(const std::filesystem::path& path) {
  SequenceReader reader(path);
  std::vector<SequenceRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

}  // namespace dwarfs::datagen
