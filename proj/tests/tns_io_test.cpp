// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fcoo/error.hpp"
#include "fcoo/generate.hpp"
#include "fcoo/tns_io.hpp"

namespace fcoo {
namespace {

namespace fs = std::filesystem;

CooTensor parse(const std::string& text) {
  std::istringstream in(text);
  return read_tns(in);
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("fcoo_tns_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(LoadTns, SingleLine) {
  const CooTensor t = parse("1 1 1 1.0\n");
  EXPECT_EQ(t.order(), 3u);
  EXPECT_EQ(std::vector<Index>(t.dims().begin(), t.dims().end()), (std::vector<Index>{1, 1, 1}));
  ASSERT_EQ(t.nnz(), 1u);
  EXPECT_EQ(t.value(0), 1.0f);
  EXPECT_EQ(t.index(0, 0), 0u);
}

TEST(LoadTns, DimsAreMaxima) {
  const CooTensor t = parse("2 1 3 5.0\n1 1 1 2.0");
  EXPECT_EQ(std::vector<Index>(t.dims().begin(), t.dims().end()), (std::vector<Index>{2, 1, 3}));
  EXPECT_EQ(t.nnz(), 2u);
  EXPECT_EQ(t.index(0, 2), 2u);
}

TEST(LoadTns, CommentsBlankLinesAndTabs) {
  const CooTensor t = parse("# header\n\n1\t2  3 0.5\n  # indented comment\n4 5 6 -1e-3\r\n");
  EXPECT_EQ(t.nnz(), 2u);
  EXPECT_FLOAT_EQ(t.value(1), -1e-3f);
}

TEST(LoadTns, DimsOverride) {
  std::istringstream in("1 2 1 1\n");
  const CooTensor t = read_tns(in, std::vector<Index>{4, 4, 4});
  EXPECT_EQ(t.dim(0), 4u);
  std::istringstream bad("5 1 1 1\n");
  EXPECT_THROW(read_tns(bad, std::vector<Index>{4, 4, 4}), FormatError);
}

TEST(LoadTns, Errors) {
  EXPECT_THROW(parse(""), FormatError);
  EXPECT_THROW(parse("# only a comment\n"), FormatError);
  EXPECT_THROW(parse("1 1 1 1\n1 1 2\n"), FormatError);       // arity
  EXPECT_THROW(parse("1 x 1 1\n"), FormatError);              // non-numeric index
  EXPECT_THROW(parse("1 1 1 abc\n"), FormatError);            // non-numeric value
  EXPECT_THROW(parse("0 1 1 1\n"), FormatError);              // 1-based
  EXPECT_THROW(parse("1 1 -1 1\n"), FormatError);
  EXPECT_THROW(parse("5\n"), FormatError);
  EXPECT_THROW(load_tns("/nonexistent/fcoo.tns"), FormatError);
}

TEST(SaveTns, EmptyAndFormatting) {
  std::ostringstream empty;
  write_tns(CooTensor({2, 2, 2}, {}, {}), empty);
  EXPECT_EQ(empty.str(), "");

  std::ostringstream one;
  write_tns(CooTensor({1, 1, 1}, {0, 0, 0}, {1.0f}), one);
  EXPECT_EQ(one.str(), "1 1 1 1\n");

  std::ostringstream frac;
  write_tns(CooTensor({3, 1}, {2, 0}, {0.1f}), frac);
  EXPECT_EQ(frac.str(), "3 1 0.1\n");
}

TEST(SaveTns, RoundTripIsExact) {
  const fs::path p = temp_file("roundtrip.tns");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CooTensor t = random_coo(std::vector<Index>{10, 20, 30}, 100, seed);
    save_tns(t, p);
    const CooTensor back = load_tns(p, std::vector<Index>{10, 20, 30});
    EXPECT_EQ(back, t);  // shortest round-trip floats reproduce bits
  }
  fs::remove(p);
}

TEST(BinaryCache, RoundTripAndCorruption) {
  const fs::path p = temp_file("cache.bin");
  const CooTensor t = random_coo(std::vector<Index>{5, 6, 7, 8}, 200, 3);
  save_binary(t, p);
  EXPECT_EQ(load_binary(p), t);

  fs::resize_file(p, fs::file_size(p) - 3);
  EXPECT_THROW(load_binary(p), FormatError);
  {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << "NOTATENSOR";
  }
  EXPECT_THROW(load_binary(p), FormatError);
  fs::remove(p);
}

}  // namespace
}  // namespace fcoo
