// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fcoo/cp.hpp"
#include "fcoo/error.hpp"
#include "fcoo/exec.hpp"
#include "fcoo/fcoo_tensor.hpp"
#include "fcoo/generate.hpp"
#include "fcoo/oracle.hpp"
#include "fcoo/tns_io.hpp"

namespace fcoo::cli {

namespace fs = std::filesystem;

const std::vector<std::string> kBenchColumns = {
    "dataset",      "op",          "mode",     "rank",          "threadlen",    "group_size",
    "workers",      "repetitions", "median_ms", "nnz",          "partitions",   "segments",
    "carry_events", "peak_scratch_bytes", "core_bytes", "seg_table_bytes", "coo_bytes", "verify",
    "rel_error"};

namespace {

// Largest nnz the bench will hand to the reference kernels.
constexpr std::size_t kOracleNnzLimit = 5'000'000;

bool is_binary(const fs::path& p) { return p.extension() == ".bin"; }

CooTensor load_any(const fs::path& p) { return is_binary(p) ? load_binary(p) : load_tns(p); }

void save_any(const CooTensor& t, const fs::path& p) {
  if (is_binary(p)) {
    save_binary(t, p);
  } else {
    save_tns(t, p);
  }
}

std::size_t to_mode(std::size_t one_based) {
  if (one_based < 1 || one_based > 3) throw ArgumentError("modes are 1, 2 or 3");
  return one_based - 1;
}

DenseMatrix random_factor(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = unit(rng);
  return m;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

template <typename T>
std::string join(const std::vector<T>& xs, const char* sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? sep : "") << xs[i];
  return os.str();
}

struct BenchRow {
  std::string dataset;
  std::string op;
  std::size_t mode = 0;  // 1-based
  std::size_t rank = 0;
  std::size_t threadlen = 0;
  std::size_t group_size = 0;
  std::size_t workers = 0;
  std::size_t repetitions = 0;
  double median_ms = 0.0;
  ExecStats stats;
  StorageBytes storage;
  std::string verify = "skipped";
  std::optional<double> rel_error;
};

nlohmann::ordered_json to_json(const BenchRow& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  j["op"] = r.op;
  j["mode"] = r.mode;
  j["rank"] = r.rank;
  j["threadlen"] = r.threadlen;
  j["group_size"] = r.group_size;
  j["workers"] = r.workers;
  j["repetitions"] = r.repetitions;
  j["median_ms"] = r.median_ms;
  j["stats"] = {{"nnz", r.stats.nnz},
                {"partitions", r.stats.partitions},
                {"segments", r.stats.segments},
                {"carry_events", r.stats.carry_events},
                {"peak_scratch_bytes", r.stats.peak_scratch_bytes}};
  j["storage"] = {{"core_bytes", r.storage.core_bytes},
                  {"seg_table_bytes", r.storage.seg_table_bytes},
                  {"coo_bytes", r.storage.coo_bytes}};
  j["verify"] = r.verify;
  j["rel_error"] = r.rel_error ? nlohmann::ordered_json(*r.rel_error) : nlohmann::ordered_json(nullptr);
  return j;
}

std::string to_csv(const BenchRow& r) {
  std::ostringstream os;
  os << r.dataset << ',' << r.op << ',' << r.mode << ',' << r.rank << ',' << r.threadlen << ','
     << r.group_size << ',' << r.workers << ',' << r.repetitions << ',' << std::setprecision(6) << r.median_ms
     << ',' << r.stats.nnz << ',' << r.stats.partitions << ',' << r.stats.segments << ','
     << r.stats.carry_events << ',' << r.stats.peak_scratch_bytes << ',' << r.storage.core_bytes << ','
     << r.storage.seg_table_bytes << ',' << r.storage.coo_bytes << ',' << r.verify << ',';
  if (r.rel_error) os << std::setprecision(3) << *r.rel_error;
  return os.str();
}

// Output of any of the three kernels, flattened for comparison.
struct KernelOutput {
  DenseMatrix dense;
  std::optional<SemiSparseTensor> semi;
};

double compare(const KernelOutput& got, const KernelOutput& ref) {
  if (got.semi) return oracle::relative_error(*got.semi, *ref.semi);
  return relative_error(got.dense, ref.dense);
}

}  // namespace

CooTensor materialize(const TensorSource& src) {
  if (!src.input.empty()) return load_any(src.input);
  if (src.kruskal_rank > 0) {
    return from_kruskal(random_kruskal(src.dims, src.kruskal_rank, src.seed), src.dims);
  }
  return random_coo(src.dims, src.nnz, src.seed);
}

std::string dataset_id(const TensorSource& src) {
  if (!src.input.empty()) return fs::path(src.input).stem().string();
  std::ostringstream os;
  os << "gen-" << join(src.dims, "x");
  if (src.kruskal_rank > 0) {
    os << "-rank" << src.kruskal_rank;
  } else {
    os << "-" << src.nnz;
  }
  os << "-s" << src.seed;
  return os.str();
}

int cmd_generate(const GenerateOptions& opt, std::ostream& log) {
  const CooTensor t = materialize(opt.source);
  save_any(t, opt.output);
  log << "wrote " << t.nnz() << " nonzeros to " << opt.output << '\n';
  return 0;
}

int cmd_convert(const ConvertOptions& opt, std::ostream& log) {
  const CooTensor t = load_any(opt.input);
  save_any(t, opt.output);
  log << "converted " << t.nnz() << " nonzeros: " << opt.input << " -> " << opt.output << '\n';
  return 0;
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& log) {
  if (opt.repetitions < 3) throw ArgumentError("bench: --repetitions must be at least 3");
  if (opt.workers == 0) throw ArgumentError("bench: --workers must be at least 1");
  const OpKind kind = parse_op_kind(opt.op);
  std::vector<std::size_t> modes;
  for (std::size_t m : opt.modes) modes.push_back(to_mode(m));

  const CooTensor t = materialize(opt.source);
  if (t.order() != 3) throw ShapeError("bench: order-3 tensors only");
  const std::string dataset = dataset_id(opt.source);

  std::ofstream file;
  std::ostream* sink = &out;
  bool header = true;
  if (!opt.out.empty()) {
    header = !fs::exists(opt.out) || fs::file_size(opt.out) == 0;
    file.open(opt.out, std::ios::app);
    if (!file) throw FormatError("bench: cannot open " + opt.out);
    sink = &file;
  }
  if (opt.format == "csv" && header) *sink << join(kBenchColumns, ",") << '\n';

  WorkerPool pool(opt.workers);
  ExecContext ctx{&pool, {}};
  ctx.options.inject_fault = opt.inject_fault;

  for (std::size_t mode : modes) {
    for (std::size_t rank : opt.ranks) {
      if (rank == 0) throw ArgumentError("bench: ranks must be positive");
      const Operation op{kind, mode};
      const ModeSpec spec = mode_spec(op);
      std::mt19937_64 rng(opt.source.seed * 7919 + rank);
      std::vector<DenseMatrix> factors;
      for (std::size_t m : spec.product_modes) factors.push_back(random_factor(t.dim(m), rank, rng));

      std::optional<KernelOutput> reference;
      if (opt.verify && t.nnz() <= kOracleNnzLimit) {
        KernelOutput ref;
        switch (kind) {
          case OpKind::SpTTM: ref.semi = oracle::ref_ttm(t, factors[0], spec.product_modes[0]); break;
          case OpKind::SpMTTKRP: ref.dense = oracle::ref_mttkrp(t, factors[0], factors[1], mode); break;
          case OpKind::SpTTMc: ref.dense = oracle::ref_ttmc(t, factors[0], factors[1], mode); break;
        }
        reference = std::move(ref);
      }

      for (std::size_t threadlen : opt.threadlens) {
        const FcooTensor f = build_fcoo(t, op, threadlen);
        for (std::size_t group : opt.group_sizes) {
          const PartitionPlan plan = make_plan(f, group, opt.col_block);
          auto run_once = [&](ExecStats* stats) {
            KernelOutput o;
            switch (kind) {
              case OpKind::SpTTM: o.semi = sp_ttm(f, factors[0], plan, ctx, stats); break;
              case OpKind::SpMTTKRP: o.dense = sp_mttkrp(f, factors[0], factors[1], plan, ctx, stats); break;
              case OpKind::SpTTMc: o.dense = sp_ttmc(f, factors[0], factors[1], plan, ctx, stats); break;
            }
            return o;
          };

          BenchRow row;
          row.dataset = dataset;
          row.op = std::string(to_string(kind));
          row.mode = mode + 1;
          row.rank = rank;
          row.threadlen = threadlen;
          row.group_size = group;
          row.workers = pool.size();
          row.repetitions = opt.repetitions;
          row.storage = storage_bytes(f);

          KernelOutput result = run_once(nullptr);  // warm-up
          std::vector<double> times;
          for (std::size_t rep = 0; rep < opt.repetitions; ++rep) {
            result = run_once(&row.stats);
            times.push_back(row.stats.wall_seconds * 1e3);
          }
          row.median_ms = median(times);

          bool failed = false;
          if (reference) {
            const double err = compare(result, *reference);
            row.rel_error = err;
            failed = !(err <= 1e-5);
            row.verify = failed ? "fail" : "pass";
          }
          if (opt.format == "json") {
            *sink << to_json(row).dump() << '\n';
          } else {
            *sink << to_csv(row) << '\n';
          }
          sink->flush();
          if (failed) {
            log << "verification failed: " << row.op << " mode " << row.mode << " rank " << rank
                << " threadlen " << threadlen << " group_size " << group << " rel_error " << *row.rel_error
                << '\n';
            return 2;
          }
        }
      }
    }
  }
  return 0;
}

int cmd_cp(const CpOptions& opt, std::ostream& out, std::ostream& log) {
  const CooTensor t = materialize(opt.source);
  CpConfig cfg;
  cfg.rank = opt.rank;
  cfg.max_iters = opt.iters;
  cfg.tol = opt.tol;
  cfg.seed = opt.seed;
  cfg.threadlen = opt.threadlen;
  cfg.group_size = opt.group_size;

  WorkerPool pool(std::max<std::size_t>(1, opt.workers));
  const CpResult res = cp_als(t, cfg, ExecContext{&pool, {}});
  for (const auto& w : res.warnings) log << "warning: " << w << '\n';

  out << "iter,fit,delta,mttkrp_mode1_ms,mttkrp_mode2_ms,mttkrp_mode3_ms\n";
  std::ostringstream csv;
  csv << "iter,fit,delta,mttkrp_mode1_ms,mttkrp_mode2_ms,mttkrp_mode3_ms\n";
  for (std::size_t it = 0; it < res.iterations; ++it) {
    const double prev = it ? res.fit_trace[it - 1] : 0.0;
    std::ostringstream line;
    line << it + 1 << ',' << std::setprecision(9) << res.fit_trace[it] << ',' << std::setprecision(3)
         << res.fit_trace[it] - prev;
    for (double s : res.mode_seconds[it]) line << ',' << std::setprecision(4) << s * 1e3;
    out << line.str() << '\n';
    csv << line.str() << '\n';
  }
  out << "final fit " << std::setprecision(9) << res.fit_trace.back() << " after " << res.iterations
      << " iterations\n";
  out << "mttkrp nnz per mode " << res.mode_nnz[0] << ' ' << res.mode_nnz[1] << ' ' << res.mode_nnz[2] << '\n';

  if (!opt.out.empty()) {
    std::ofstream lam(opt.out + ".lambda.txt");
    lam << std::setprecision(17);
    for (std::size_t r = 0; r < res.model.rank(); ++r) lam << (r ? " " : "") << res.model.lambda[r];
    lam << '\n';
    for (std::size_t n = 0; n < 3; ++n) {
      std::ofstream f(opt.out + ".mode" + std::to_string(n + 1) + ".tns");
      f << std::setprecision(17);
      const DenseMatrix& a = res.model.factors[n];
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t r = 0; r < a.cols(); ++r) f << i + 1 << ' ' << r + 1 << ' ' << a(i, r) << '\n';
    }
    std::ofstream fit(opt.out + ".fit.csv");
    fit << csv.str();
    if (!lam || !fit) throw FormatError("cp: failed writing results under " + opt.out);
  }
  return 0;
}

int cmd_storage(const StorageOptions& opt, std::ostream& out) {
  const CooTensor t = materialize(opt.source);
  const OpKind kind = parse_op_kind(opt.op);
  out << "op,mode,threadlen,nnz,nsegs,core_bytes,seg_table_bytes,coo_bytes,core_bytes_per_nnz\n";
  for (std::size_t m : opt.modes) {
    for (std::size_t threadlen : opt.threadlens) {
      const FcooTensor f = build_fcoo(t, {kind, to_mode(m)}, threadlen);
      const StorageBytes s = storage_bytes(f);
      out << to_string(kind) << ',' << m << ',' << threadlen << ',' << f.nnz << ',' << f.nsegs() << ','
          << s.core_bytes << ',' << s.seg_table_bytes << ',' << s.coo_bytes << ',' << std::setprecision(6)
          << static_cast<double>(s.core_bytes) / static_cast<double>(f.nnz) << '\n';
    }
  }
  return 0;
}

}  // namespace fcoo::cli
