#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace dwarfs::datagen {

struct SequenceRecord {
  std::string key;
  std::string value;
  bool operator==(const SequenceRecord&) const = default;
};

struct SequenceFile {
  std::filesystem::path path;
  std::uint64_t record_count = 0;
};

inline constexpr char kSequenceMagic[5] = "DDSQ";
inline constexpr std::uint8_t kSequenceVersion = 1;

/// 8-byte little-endian encoding of a line number.
std::string line_key(std::uint64_t line);
std::uint64_t decode_line_key(const std::string& key);

/// Streams `corpus` into a sequence file: one record per line, keyed by the
/// zero-based line number. A trailing partial line becomes a record.
SequenceFile gen_sequence(const std::filesystem::path& corpus, const std::filesystem::path& out);

class SequenceWriter {
 public:
  explicit SequenceWriter(const std::filesystem::path& path);
  void write(const SequenceRecord& record);
  void close();
  std::uint64_t count() const { return count_; }

 private:
  std::ofstream out_;
  std::uint64_t count_ = 0;
};

class SequenceReader {
 public:
  explicit SequenceReader(const std::filesystem::path& path);
  /// Next record, or nullopt at end of file. Throws FormatError on a
  /// malformed or truncated record.
  std::optional<SequenceRecord> next();

 private:
  std::ifstream in_;
};

std::vector<SequenceRecord> read_sequence(const std::filesystem::path& path);

}  // namespace dwarfs::datagen
