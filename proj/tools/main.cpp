// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fcoo/error.hpp"

namespace {

void add_source(CLI::App* cmd, fcoo::cli::TensorSource& src) {
  cmd->add_option("-i,--input", src.input, "Tensor file (.tns or .bin); omit to generate one");
  cmd->add_option("--dims", src.dims, "Extents of a generated tensor")->delimiter(',');
  cmd->add_option("--nnz", src.nnz, "Nonzeros of a generated tensor");
  cmd->add_option("--gen-seed", src.seed, "Seed of the tensor generator");
  cmd->add_option("--kruskal-rank", src.kruskal_rank,
                  "Generate the dense tensor of a random rank-K model instead of random coordinates");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fcoo::cli;
  CLI::App app{"F-COO sparse tensor kernels: conversion, benchmarking and CP-ALS"};
  app.require_subcommand(1);
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic tensor");
  add_source(generate, gen.source);
  generate->add_option("--seed", gen.source.seed, "Alias of --gen-seed");
  generate->add_option("-o,--out", gen.output, "Output file (.tns or .bin)")->required();

  ConvertOptions conv;
  auto* convert = app.add_subcommand("convert", "Convert between .tns text and the binary cache");
  convert->add_option("input", conv.input)->required();
  convert->add_option("output", conv.output)->required();

  BenchOptions bench;
  bench.workers = hw;
  auto* b = app.add_subcommand("bench", "Benchmark a kernel over a parameter sweep");
  add_source(b, bench.source);
  b->add_option("--op", bench.op)->check(CLI::IsMember({"spttm", "spmttkrp", "spttmc"}));
  b->add_option("--mode", bench.modes, "Target modes, 1-based")->delimiter(',');
  b->add_option("--rank", bench.ranks)->delimiter(',');
  b->add_option("--threadlen", bench.threadlens)->delimiter(',');
  b->add_option("--group-size", bench.group_sizes)->delimiter(',');
  b->add_option("--col-block", bench.col_block, "Output columns per task (0 = all)");
  b->add_option("--workers", bench.workers);
  b->add_option("--repetitions", bench.repetitions);
  b->add_flag("--verify", bench.verify, "Check every row against the reference kernel");
  b->add_option("--format", bench.format)->check(CLI::IsMember({"csv", "json"}));
  b->add_option("--seed", bench.source.seed, "Seed for the tensor and dense factors");
  b->add_option("--out", bench.out, "Append rows to this file instead of stdout");
  b->add_flag("--inject-fault", bench.inject_fault, "Corrupt kernel output (test hook)")->group("");

  CpOptions cpo;
  cpo.workers = hw;
  auto* cp = app.add_subcommand("cp", "Run CP-ALS");
  add_source(cp, cpo.source);
  cp->add_option("--rank", cpo.rank);
  cp->add_option("--iters", cpo.iters);
  cp->add_option("--tol", cpo.tol);
  cp->add_option("--seed", cpo.seed, "Seed of the factor initialization");
  cp->add_option("--threadlen", cpo.threadlen);
  cp->add_option("--group-size", cpo.group_size);
  cp->add_option("--workers", cpo.workers);
  cp->add_option("--out", cpo.out, "Prefix for exported factors, weights and fit trace");

  StorageOptions sto;
  auto* storage = app.add_subcommand("storage", "Report COO vs F-COO storage in bytes");
  add_source(storage, sto.source);
  storage->add_option("--op", sto.op)->check(CLI::IsMember({"spttm", "spmttkrp", "spttmc"}));
  storage->add_option("--mode", sto.modes)->delimiter(',');
  storage->add_option("--threadlen", sto.threadlens)->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(gen, std::cerr);
    if (*convert) return cmd_convert(conv, std::cerr);
    if (*b) return cmd_bench(bench, std::cout, std::cerr);
    if (*cp) return cmd_cp(cpo, std::cout, std::cerr);
    if (*storage) return cmd_storage(sto, std::cout);
  } catch (const fcoo::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
