// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fcoo/coo_tensor.hpp"

namespace fcoo::cli {

/// Where a command gets its tensor: a file, or a seeded generator.
struct TensorSource {
  std::string input;                      // .tns or .bin; empty means generate
  std::vector<Index> dims{64, 64, 64};
  std::uint64_t nnz = 5000;
  std::uint64_t seed = 1;
  std::size_t kruskal_rank = 0;           // > 0: dense tensor of a random rank-K model
};

CooTensor materialize(const TensorSource& src);
std::string dataset_id(const TensorSource& src);

struct GenerateOptions {
  TensorSource source;
  std::string output;
};

struct ConvertOptions {
  std::string input;
  std::string output;
};

struct BenchOptions {
  TensorSource source;
  std::string op = "spmttkrp";
  std::vector<std::size_t> modes{1};  // 1-based
  std::vector<std::size_t> ranks{16};
  std::vector<std::size_t> threadlens{8, 16, 32, 64};
  std::vector<std::size_t> group_sizes{32, 128, 512};
  std::size_t col_block = 0;
  std::size_t workers = 1;
  std::size_t repetitions = 3;
  bool verify = false;
  std::string format = "csv";
  std::string out;
  bool inject_fault = false;
};

struct CpOptions {
  TensorSource source;
  std::size_t rank = 8;
  std::size_t iters = 50;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  std::size_t threadlen = 16;
  std::size_t group_size = 32;
  std::size_t workers = 1;
  std::string out;
};

struct StorageOptions {
  TensorSource source;
  std::string op = "spmttkrp";
  std::vector<std::size_t> modes{1};
  std::vector<std::size_t> threadlens{8, 16, 32, 64};
};

// Each command returns a process exit status.
int cmd_generate(const GenerateOptions& opt, std::ostream& log);
int cmd_convert(const ConvertOptions& opt, std::ostream& log);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& log);
int cmd_cp(const CpOptions& opt, std::ostream& out, std::ostream& log);
int cmd_storage(const StorageOptions& opt, std::ostream& out);

/// Fixed CSV column order of a benchmark row.
extern const std::vector<std::string> kBenchColumns;

}  // namespace fcoo::cli
