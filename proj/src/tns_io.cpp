// SPDX-License-Identifier: Apache-2.0
#include "fcoo/tns_io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "fcoo/error.hpp"

namespace fcoo {

namespace {

constexpr std::array<char, 8> kBinaryMagic = {'F', 'C', 'O', 'O', 'T', 'N', 'S', '1'};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

[[noreturn]] void fail(std::size_t lineno, const std::string& what) {
  throw FormatError("tns line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

CooTensor read_tns(std::istream& in, const std::optional<std::vector<Index>>& dims_override) {
  std::vector<Index> indices;
  std::vector<Value> values;
  std::vector<Index> maxima;
  std::size_t order = 0;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() < 2) fail(lineno, "expected at least one index and a value");
    if (order == 0) {
      order = fields.size() - 1;
      maxima.assign(order, 0);
    } else if (fields.size() - 1 != order) {
      fail(lineno, "expected " + std::to_string(order + 1) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (std::size_t m = 0; m < order; ++m) {
      const auto f = fields[m];
      std::uint64_t idx = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), idx);
      if (ec != std::errc() || ptr != f.data() + f.size()) fail(lineno, "non-numeric index '" + std::string(f) + "'");
      if (idx < 1) fail(lineno, "indices are 1-based");
      if (idx > std::numeric_limits<Index>::max()) fail(lineno, "index exceeds 32 bits");
      const auto zero_based = static_cast<Index>(idx - 1);
      indices.push_back(zero_based);
      maxima[m] = std::max(maxima[m], static_cast<Index>(idx));
    }
    const auto f = fields.back();
    Value v = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size()) fail(lineno, "non-numeric value '" + std::string(f) + "'");
    values.push_back(v);
  }
  if (in.bad()) throw FormatError("tns: read failure");
  if (values.empty()) throw FormatError("tns: no data lines");

  std::vector<Index> dims = maxima;
  if (dims_override) {
    if (dims_override->size() != order) throw FormatError("tns: dims override has the wrong order");
    for (std::size_t m = 0; m < order; ++m) {
      if (maxima[m] > (*dims_override)[m]) throw FormatError("tns: index exceeds dims override");
    }
    dims = *dims_override;
  }
  return CooTensor(std::move(dims), std::move(indices), std::move(values));
}

CooTensor load_tns(const std::filesystem::path& path, const std::optional<std::vector<Index>>& dims_override) {
  std::ifstream in(path);
  if (!in) throw FormatError("tns: cannot open " + path.string());
  return read_tns(in, dims_override);
}

void write_tns(const CooTensor& t, std::ostream& out) {
  std::array<char, 64> buf{};
  std::string line;
  for (std::size_t n = 0; n < t.nnz(); ++n) {
    line.clear();
    for (std::size_t m = 0; m < t.order(); ++m) {
      line += std::to_string(std::uint64_t{t.index(n, m)} + 1);
      line += ' ';
    }
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), t.value(n));
    line.append(buf.data(), ptr);
    line += '\n';
    out << line;
  }
}

void save_tns(const CooTensor& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("tns: cannot open " + path.string() + " for writing");
  write_tns(t, out);
  out.flush();
  if (!out) throw FormatError("tns: write failure on " + path.string());
}

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("binary tensor: truncated file");
  return v;
}

}  // namespace

void save_binary(const CooTensor& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("binary tensor: cannot open " + path.string() + " for writing");
  out.write(kBinaryMagic.data(), kBinaryMagic.size());
  put(out, static_cast<std::uint32_t>(t.order()));
  for (Index d : t.dims()) put(out, d);
  put(out, static_cast<std::uint64_t>(t.nnz()));
  out.write(reinterpret_cast<const char*>(t.indices().data()),
            static_cast<std::streamsize>(t.indices().size_bytes()));
  out.write(reinterpret_cast<const char*>(t.values().data()),
            static_cast<std::streamsize>(t.values().size_bytes()));
  out.flush();
  if (!out) throw FormatError("binary tensor: write failure on " + path.string());
}

CooTensor load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("binary tensor: cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kBinaryMagic) throw FormatError("binary tensor: bad magic in " + path.string());
  const auto order = get<std::uint32_t>(in);
  if (order == 0 || order > 64) throw FormatError("binary tensor: implausible order");
  std::vector<Index> dims(order);
  for (auto& d : dims) d = get<Index>(in);
  const auto nnz = get<std::uint64_t>(in);
  std::vector<Index> indices(nnz * order);
  std::vector<Value> values(nnz);
  in.read(reinterpret_cast<char*>(indices.data()), static_cast<std::streamsize>(indices.size() * sizeof(Index)));
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(Value)));
  if (!in) throw FormatError("binary tensor: truncated file");
  return CooTensor(std::move(dims), std::move(indices), std::move(values));
}

}  // namespace fcoo
