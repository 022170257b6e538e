#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wsin {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Mixes a base seed with grid coordinates (splitmix64 finalizer applied per coordinate).
std::uint64_t derive_seed(std::uint64_t base, std::span<const std::uint64_t> coordinates);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coordinates);

/// Shortest round-trippable decimal form ("%.17g"), "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double value);

/// Joins values with ';' using format_double.
std::string join_doubles(std::span<const double> values);

/// Reads a real-valued sample file. `.bin`, `.f64` and `.raw` are read as little-endian
/// IEEE-754 float64; anything else as headerless text with one value per line (blank lines
/// and '#' comments skipped). Throws ParseError with line/offset or IoError.
std::vector<double> read_samples(const std::filesystem::path& path);

std::vector<double> parse_sample_text(std::string_view text);
std::vector<double> parse_sample_binary(std::string_view bytes);

void write_samples_binary(const std::filesystem::path& path, std::span<const double> samples);

/// Minimal RFC 4180 writer. Fields containing ',', '"' or newlines are quoted.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  void write_line(const std::vector<std::string>& fields);

  std::filesystem::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

/// Creates the directory (and parents); IoError with the path on failure.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace wsin
