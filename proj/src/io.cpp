#include "wsin/io.hpp"

#include <bit>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "wsin/error.hpp"

namespace wsin {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::span<const std::uint64_t> coordinates) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t c : coordinates) h = splitmix64(h ^ splitmix64(c));
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coordinates) {
  return derive_seed(base, std::span<const std::uint64_t>(coordinates.begin(), coordinates.size()));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string join_doubles(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

std::vector<double> parse_sample_text(std::string_view text) {
  std::vector<double> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const std::size_t line_start = pos;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;

    std::size_t first = 0;
    while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
    std::size_t last = line.size();
    while (last > first && std::isspace(static_cast<unsigned char>(line[last - 1]))) --last;
    if (first == last || line[first] == '#') continue;

    const std::string token(line.substr(first, last - first));
    char* parse_end = nullptr;
    errno = 0;
    const double v = std::strtod(token.c_str(), &parse_end);
    const std::size_t consumed = static_cast<std::size_t>(parse_end - token.c_str());
    if (consumed != token.size() || consumed == 0) {
      throw ParseError(line_no, line_start + first + consumed,
                       "sample file line " + std::to_string(line_no) + ": cannot parse '" +
                           token + "' as a number");
    }
    if (!std::isfinite(v)) {
      throw ParseError(line_no, line_start + first,
                       "sample file line " + std::to_string(line_no) + ": non-finite value");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_sample_binary(std::string_view bytes) {
  if (bytes.size() % 8 != 0) {
    throw ParseError(0, bytes.size() - bytes.size() % 8,
                     "binary sample file size " + std::to_string(bytes.size()) +
                         " is not a multiple of 8");
  }
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t raw = 0;
    for (int b = 7; b >= 0; --b) {
      raw = (raw << 8) | static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)]);
    }
    out[i] = std::bit_cast<double>(raw);
    if (!std::isfinite(out[i])) {
      throw ParseError(0, i * 8, "binary sample " + std::to_string(i) + " is not finite");
    }
  }
  return out;
}

std::vector<double> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open sample file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  const std::string ext = path.extension().string();
  std::vector<double> samples = (ext == ".bin" || ext == ".f64" || ext == ".raw")
                                    ? parse_sample_binary(bytes)
                                    : parse_sample_text(bytes);
  if (samples.size() < 2) {
    throw ParseError(0, bytes.size(),
                     path.string() + ": need at least 2 samples, found " +
                         std::to_string(samples.size()));
  }
  return samples;
}

void write_samples_binary(const std::filesystem::path& path, std::span<const double> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (double v : samples) {
    const auto raw = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((raw >> (8 * b)) & 0xff);
    out.write(bytes, 8);
  }
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary) {
  if (!out_) throw IoError("cannot write " + path.string());
  write_line(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) {
    throw ValidationError(path_.string() + ": row has " + std::to_string(fields.size()) +
                          " fields, header has " + std::to_string(columns_));
  }
  write_line(fields);
}

void CsvWriter::write_line(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n\r") != std::string::npos) {
      out_ << '"';
      for (char c : f) {
        if (c == '"') out_ << '"';
        out_ << c;
      }
      out_ << '"';
    } else {
      out_ << f;
    }
  }
  out_ << '\n';
  if (!out_) throw IoError("write failed: " + path_.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace wsin
