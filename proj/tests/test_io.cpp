#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "wsin/error.hpp"
#include "wsin/io.hpp"

using namespace wsin;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wsin_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Seeds, DeriveSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(7, {1, 2, 3}), derive_seed(7, {1, 2, 3}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(0, {a, b}));
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_NE(derive_seed(0, {1, 2}), derive_seed(0, {2, 1}));
  EXPECT_NE(derive_seed(0, {1}), derive_seed(1, {1}));
}

TEST(Fnv, KnownVector) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(join_doubles(std::vector<double>{1.0, 0.5}), "1;0.5");
}

TEST(SampleText, ParsesCommentsAndBlanks) {
  const auto v = parse_sample_text("# header\n1.5\n\n  -2e-3  \n# mid\n4\n");
  EXPECT_EQ(v, (std::vector<double>{1.5, -2e-3, 4.0}));
  EXPECT_EQ(parse_sample_text("1\r\n2\r\n"), (std::vector<double>{1.0, 2.0}));
}

TEST(SampleText, ErrorCarriesLineAndOffset) {
  try {
    parse_sample_text("1.0\n2.0\n3.x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.offset(), 10u);
  }
  try {
    parse_sample_text("1.0\n  2.0 3.0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.offset(), 9u);
  }
  EXPECT_THROW(parse_sample_text("1\nnan\n"), ParseError);
}

TEST(SampleFiles, TextAndBinary) {
  const fs::path txt = scratch("s.txt");
  write_text(txt, "0.25\n-1\n3\n");
  EXPECT_EQ(read_samples(txt), (std::vector<double>{0.25, -1.0, 3.0}));

  const std::vector<double> data{1.0, -0.5, 1e-300, 42.0};
  const fs::path bin = scratch("s.f64");
  write_samples_binary(bin, data);
  EXPECT_EQ(fs::file_size(bin), 32u);
  EXPECT_EQ(read_samples(bin), data);
  const std::string raw = slurp(bin);
  EXPECT_EQ(static_cast<unsigned char>(raw[7]), 0x3f);  // little-endian 1.0
}

TEST(SampleFiles, Errors) {
  const fs::path one = scratch("one.txt");
  write_text(one, "1.0\n");
  EXPECT_THROW(read_samples(one), ParseError);
  const fs::path odd = scratch("odd.bin");
  write_text(odd, std::string(12, '\0'));
  try {
    read_samples(odd);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
  EXPECT_THROW(read_samples(scratch("missing.txt")), IoError);
}

TEST(Csv, QuotesAndColumnCount) {
  const fs::path p = scratch("t.csv");
  {
    CsvWriter w(p, {"a", "b"});
    w.row({"plain", "has,comma"});
    w.row({"say \"hi\"", "two\nlines"});
    EXPECT_THROW(w.row({"only"}), ValidationError);
  }
  EXPECT_EQ(slurp(p), "a,b\nplain,\"has,comma\"\n\"say \"\"hi\"\"\",\"two\nlines\"\n");
}

TEST(Csv, UnwritablePathNamesPath) {
  try {
    CsvWriter w("/proc/definitely/not/here.csv", {"a"});
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/definitely/not/here.csv"), std::string::npos);
  }
}
