#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace mfruin {

// CSV sink with a fixed numeric format: %.15g (>= 12 significant digits),
// '.' decimal point, comma separation, header row first. The format is pinned
// so reruns with the same config and seed are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header);

  void write_row(std::initializer_list<double> values);
  void write_row(const std::vector<double>& values);
  // Mixed rows (leading labels/integers formatted by the caller).
  void write_raw_row(const std::string& line);

  const std::filesystem::path& path() const { return path_; }

  static std::string format(double v);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

// FNV-1a 64-bit digest, used for manifest checksums.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t file_checksum(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

}  // namespace mfruin
