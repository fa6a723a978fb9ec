// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcoo/cp.hpp"
#include "fcoo/exec.hpp"
#include "fcoo/fcoo_tensor.hpp"
#include "fcoo/generate.hpp"
#include "fcoo/oracle.hpp"

namespace {

using namespace fcoo;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first failure message; later failures only flip the flag.
struct Check {
  Outcome out;
  void expect(bool cond, const std::string& what) {
    if (!cond && out.ok) out.detail = what;
    out.ok = out.ok && cond;
  }
};

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = u(rng);
  return m;
}

std::vector<Index> random_dims(std::mt19937_64& rng, Index hi) {
  std::uniform_int_distribution<Index> d(1, hi);
  return {d(rng), d(rng), d(rng)};
}

CooTensor random_tensor(std::mt19937_64& rng, Index max_dim, std::uint64_t max_nnz) {
  const auto dims = random_dims(rng, max_dim);
  const std::uint64_t cap = std::min<std::uint64_t>(max_nnz, std::uint64_t{dims[0]} * dims[1] * dims[2]);
  std::uniform_int_distribution<std::uint64_t> n(1, cap);
  return random_coo(dims, n(rng), rng());
}

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::vector<std::size_t> other_modes(std::size_t mode) {
  std::vector<std::size_t> o;
  for (std::size_t m = 0; m < 3; ++m)
    if (m != mode) o.push_back(m);
  return o;
}

// Runs the kernel for `op` against its oracle and returns the relative error.
double kernel_vs_oracle(const CooTensor& t, Operation op, std::size_t threadlen, std::size_t rank,
                        std::mt19937_64& rng) {
  const auto o = other_modes(op.mode);
  const FcooTensor f = build_fcoo(t, op, threadlen);
  const PartitionPlan plan = make_plan(f);
  switch (op.kind) {
    case OpKind::SpTTM: {
      const DenseMatrix u = random_matrix(t.dim(op.mode), rank, rng);
      return oracle::relative_error(sp_ttm(f, u, plan), oracle::ref_ttm(t, u, op.mode));
    }
    case OpKind::SpMTTKRP: {
      const DenseMatrix b = random_matrix(t.dim(o[0]), rank, rng);
      const DenseMatrix c = random_matrix(t.dim(o[1]), rank, rng);
      return relative_error(sp_mttkrp(f, b, c, plan), oracle::ref_mttkrp(t, b, c, op.mode));
    }
    case OpKind::SpTTMc: {
      const DenseMatrix b = random_matrix(t.dim(o[0]), rank, rng);
      const DenseMatrix c = random_matrix(t.dim(o[1]), rank, rng);
      return relative_error(sp_ttmc(f, b, c, plan), oracle::ref_ttmc(t, b, c, op.mode));
    }
  }
  return INFINITY;
}

Outcome storage_formula() {
  Check c;
  std::mt19937_64 rng(1);
  std::size_t pairs = 0;
  for (std::uint64_t nnz : {1024, 2048, 3072, 4096}) {
    const CooTensor t = random_coo(std::vector<Index>{32, 32, 32}, nnz, rng());
    for (std::size_t T : {2, 4, 8, 16, 32}) {
      ++pairs;
      // Closed per-nnz forms scaled by 8T: (8 + 1/8 + 1/(8T)) and (12 + 1/8 + 1/(8T)).
      const std::uint64_t ttm = (64 * T + T + 1) * nnz, mttkrp = (96 * T + T + 1) * nnz;
      for (OpKind kind : {OpKind::SpTTM, OpKind::SpMTTKRP, OpKind::SpTTMc}) {
        for (std::size_t mode = 0; mode < 3; ++mode) {
          const StorageBytes s = storage_bytes(build_fcoo(t, {kind, mode}, T));
          const std::uint64_t want = kind == OpKind::SpTTM ? ttm : mttkrp;
          c.expect(s.core_bytes * 8 * T == want, "core bytes off at nnz=" + std::to_string(nnz) +
                                                     " threadlen=" + std::to_string(T));
          c.expect(s.coo_bytes == 16 * nnz, "coo bytes off");
        }
      }
    }
  }
  const CooTensor t = random_coo(std::vector<Index>{16, 16, 16}, 1024, 7);
  const StorageBytes ttm = storage_bytes(build_fcoo(t, {OpKind::SpTTM, 2}, 8));
  const StorageBytes mtt = storage_bytes(build_fcoo(t, {OpKind::SpMTTKRP, 0}, 8));
  c.expect(ttm.core_bytes == 8336 && mtt.core_bytes == 12432 && mtt.coo_bytes == 16384,
           "1024-nnz reference values");
  c.out.detail = c.out.ok ? std::to_string(pairs) + " (nnz, threadlen) pairs, 8336/12432/16384" : c.out.detail;
  return c.out;
}

Outcome kernel_oracle() {
  Check c;
  std::mt19937_64 rng(2);
  double worst = 0.0;
  std::size_t calls = 0;
  const std::size_t ranks[] = {1, 4, 16};
  for (std::size_t trial = 0; trial < 200; ++trial) {
    const CooTensor t = random_tensor(rng, 16, 2048);
    const std::size_t rank = ranks[trial % 3];
    for (OpKind kind : {OpKind::SpTTM, OpKind::SpMTTKRP, OpKind::SpTTMc}) {
      for (std::size_t mode = 0; mode < 3; ++mode) {
        for (std::size_t T : {1, 2, 8, 32, 64}) {
          const double err = kernel_vs_oracle(t, {kind, mode}, T, rank, rng);
          worst = std::max(worst, err);
          ++calls;
          c.expect(err <= 1e-5, std::string(to_string(kind)) + " trial " + std::to_string(trial) +
                                    " rel_error " + num(err));
        }
      }
    }
  }
  if (c.out.ok) c.out.detail = std::to_string(calls) + " kernel calls, worst rel_error " + num(worst);
  return c.out;
}

Outcome dual_path() {
  Check c;
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    const CooTensor t = random_tensor(rng, 60, 3000);
    const std::size_t mode = trial % 3;
    const auto o = other_modes(mode);
    const std::size_t rank = 1 + trial % 8;
    const DenseMatrix b = random_matrix(t.dim(o[0]), rank, rng);
    const DenseMatrix cc = random_matrix(t.dim(o[1]), rank, rng);
    const double err = relative_error(oracle::ref_mttkrp(t, b, cc, mode), oracle::ref_mttkrp_unfolded(t, b, cc, mode));
    worst = std::max(worst, err);
    c.expect(err <= 1e-5, "trial " + std::to_string(trial));
  }
  if (c.out.ok) c.out.detail = "50 instances, worst rel_error " + num(worst);
  return c.out;
}

Outcome flag_correctness() {
  Check c;
  std::mt19937_64 rng(4);
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const CooTensor t = random_tensor(rng, 12, 800);
    const OpKind kind = std::array{OpKind::SpTTM, OpKind::SpMTTKRP, OpKind::SpTTMc}[trial % 3];
    const std::size_t T = std::array<std::size_t, 5>{1, 2, 5, 16, 64}[rng() % 5];
    try {
      validate_flags(build_fcoo(t, {kind, rng() % 3}, T), t);
    } catch (const std::exception& e) {
      c.expect(false, std::string("trial ") + std::to_string(trial) + ": " + e.what());
    }
  }

  auto bits = [](const FcooTensor& f) {
    std::string bf, sf;
    for (std::size_t n = 0; n < f.nnz; ++n) bf += f.head(n) ? '1' : '0';
    for (std::size_t p = 0; p < f.npartitions; ++p) sf += f.start_flag(p) ? '1' : '0';
    return bf + "/" + sf;
  };
  const CooTensor a({3, 2, 2}, {0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1, 0, 2, 0, 0}, {1, 1, 1, 1, 1});
  const FcooTensor fa = build_fcoo(a, {OpKind::SpMTTKRP, 0}, 2);
  c.expect(bits(fa) == "10101/111", "hand case 1 gave " + bits(fa));
  c.expect(fa.seg_coords == std::vector<Index>{0, 1, 2}, "hand case 1 seg_coords");
  const CooTensor b({2, 2, 2}, {0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0}, {1, 1, 1, 1});
  const FcooTensor fb = build_fcoo(b, {OpKind::SpMTTKRP, 0}, 2);
  c.expect(bits(fb) == "1001/10", "hand case 2 gave " + bits(fb));
  if (c.out.ok) c.out.detail = "100 random combinations, bf/sf hand cases 10101/111 and 1001/10";
  return c.out;
}

Outcome determinism() {
  Check c;
  std::mt19937_64 rng(5);
  WorkerPool one(1), two(2), eight(8);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const CooTensor t = random_tensor(rng, 40, 20000);
    const std::size_t mode = trial % 3;
    const auto o = other_modes(mode);
    const DenseMatrix b = random_matrix(t.dim(o[0]), 8, rng);
    const DenseMatrix cc = random_matrix(t.dim(o[1]), 8, rng);
    const Operation op{OpKind::SpMTTKRP, mode};
    DenseMatrix base;
    for (std::size_t T : {1, 2, 8, 32, 64}) {
      const FcooTensor f = build_fcoo(t, op, T);
      const PartitionPlan plan = make_plan(f, 1 + trial % 7, trial % 2 ? 3 : 0);
      const DenseMatrix m1 = sp_mttkrp(f, b, cc, plan, {&one, {}});
      c.expect(sp_mttkrp(f, b, cc, plan, {&two, {}}) == m1, "2 workers differ, trial " + std::to_string(trial));
      c.expect(sp_mttkrp(f, b, cc, plan, {&eight, {}}) == m1, "8 workers differ, trial " + std::to_string(trial));
      if (T == 1) {
        base = m1;
      } else {
        const double err = relative_error(m1, base);
        worst = std::max(worst, err);
        c.expect(err <= 1e-6, "threadlen " + std::to_string(T) + " drifts, trial " + std::to_string(trial));
      }
    }
  }
  if (c.out.ok) c.out.detail = "bit-exact over 1/2/8 workers, worst cross-threadlen drift " + num(worst);
  return c.out;
}

Outcome memory_bound() {
  Check c;
  std::mt19937_64 rng(6);
  const CooTensor t = random_coo(std::vector<Index>{200, 200, 200}, 100000, 6);
  const std::size_t R = 16;
  std::ostringstream detail;
  for (std::size_t mode = 0; mode < 3; ++mode) {
    const DenseMatrix b = random_matrix(200, R, rng);
    const DenseMatrix cc = random_matrix(200, R, rng);
    for (std::size_t T : {8, 16, 32, 64}) {
      const FcooTensor f = build_fcoo(t, {OpKind::SpMTTKRP, mode}, T);
      ExecStats stats;
      sp_mttkrp(f, b, cc, make_plan(f), {}, &stats);
      const double scalars = static_cast<double>(stats.peak_scratch_bytes) / sizeof(double);
      const double ratio = scalars / static_cast<double>((f.npartitions + f.nsegs()) * R);
      c.expect(ratio <= 4.0, "scratch ratio " + num(ratio) + " at threadlen " + std::to_string(T));
      c.expect(stats.largest_scratch_buffer_bytes < f.nnz * R * sizeof(double), "nnz x R sized buffer");
      if (mode == 0) detail << "T=" << T << " c=" << ratio << ' ';
    }
  }
  if (c.out.ok) c.out.detail = "peak scratch / ((P + S) R): " + detail.str();
  return c.out;
}

bool monotone(const std::vector<double>& trace) {
  for (std::size_t n = 1; n < trace.size(); ++n)
    if (trace[n] < trace[n - 1] - 1e-7) return false;
  return true;
}

Outcome cp_recovery() {
  Check c;
  std::ostringstream detail;
  const std::vector<std::vector<Index>> shapes{{6, 5, 4}, {10, 10, 10}, {20, 20, 20}};
  for (std::size_t rank : {1, 3}) {
    for (const auto& dims : shapes) {
      const CooTensor t = from_kruskal(random_kruskal(dims, rank, 100 + rank), dims);
      CpConfig cfg;
      cfg.rank = rank;
      cfg.track_half_steps = true;
      const CpResult r = cp_als(t, cfg);
      const double need = rank == 1 ? 0.999 : 0.99;
      const std::size_t iters = rank == 1 ? 25 : 50;
      const std::string tag = "rank " + std::to_string(rank) + " on " + std::to_string(dims[0]) + "x" +
                              std::to_string(dims[1]) + "x" + std::to_string(dims[2]);
      c.expect(r.fit_trace.back() >= need, tag + " fit " + num(r.fit_trace.back()));
      c.expect(r.iterations <= iters, tag + " took " + std::to_string(r.iterations) + " iterations");
      c.expect(monotone(r.fit_trace) && monotone(r.half_step_fits), tag + " fit trace not monotone");
      detail << "r" << rank << ':' << dims[0] << "x" << dims[1] << "x" << dims[2] << " fit "
             << num(r.fit_trace.back()) << " in " << r.iterations << "; ";
    }
  }
  if (c.out.ok) c.out.detail = detail.str();
  return c.out;
}

Outcome penrose() {
  Check c;
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    const std::size_t R = 1 + trial % 16;
    const std::size_t rows = trial % 2 ? R + 5 : std::max<std::size_t>(1, R / 2);  // odd: full rank
    const DenseMatrix a = random_matrix(rows, R, rng);
    const DenseMatrix g = matmul(transpose(a), a);
    const DenseMatrix p = pinv_spd(g);
    const DenseMatrix back = matmul(matmul(g, p), g);
    const double err = relative_error(back, g);
    const double asym = relative_error(p, transpose(p));
    worst = std::max({worst, err, asym});
    c.expect(err < 1e-8, "G G+ G residual " + num(err) + " at R=" + std::to_string(R));
    c.expect(asym < 1e-8, "pseudoinverse not symmetric at R=" + std::to_string(R));
  }
  if (c.out.ok) {
    std::ostringstream os;
    os << "50 matrices, worst residual " << worst;
    c.out.detail = os.str();
  }
  return c.out;
}

Outcome mode_balance() {
  Check c;
  const CooTensor t = random_coo(std::vector<Index>{100, 100, 100}, 100000, 9);
  CpConfig cfg;
  cfg.rank = 16;
  cfg.max_iters = 5;
  cfg.tol = 0.0;
  const CpResult r = cp_als(t, cfg);
  c.expect(r.mode_nnz[0] == t.nnz() && r.mode_nnz[1] == t.nnz() && r.mode_nnz[2] == t.nnz(),
           "per-mode nnz differ");
  std::array<double, 3> med{};
  for (std::size_t m = 0; m < 3; ++m) {
    std::vector<double> s;
    for (const auto& it : r.mode_seconds) s.push_back(it[m]);
    std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
    med[m] = s[s.size() / 2];
  }
  const double band = *std::max_element(med.begin(), med.end()) / *std::min_element(med.begin(), med.end());
  c.expect(band <= 3.0, "per-mode time band " + num(band));
  std::ostringstream os;
  os << "nnz per mode " << r.mode_nnz[0] << ", median ms " << med[0] * 1e3 << '/' << med[1] * 1e3 << '/'
     << med[2] * 1e3 << ", band " << band;
  if (c.out.ok) c.out.detail = os.str();
  return c.out;
}

int run_cli(const std::string& args, const std::string& capture) {
  const std::string cmd = std::string("\"") + FCOO_CLI_PATH + "\" " + args + " > \"" + capture + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return status == -1 ? -1 : WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

Outcome cli_end_to_end() {
  Check c;
  const auto dir = std::filesystem::temp_directory_path();
  const std::string log = (dir / "fcoo_acceptance_bench.txt").string();
  const std::string csv = (dir / "fcoo_acceptance_bench.csv").string();
  std::filesystem::remove(csv);

  const int ok = run_cli("bench --verify --out \"" + csv + "\"", log);
  c.expect(ok == 0, "bench --verify exited " + std::to_string(ok));
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0, passed = 0;
  while (std::getline(in, line)) {
    ++rows;
    passed += line.find(",pass,") != std::string::npos;
  }
  c.expect(rows > 0 && rows == passed, std::to_string(passed) + " of " + std::to_string(rows) + " rows pass");

  const int bad = run_cli("bench --verify --threadlen 8 --group-size 32 --inject-fault", log);
  c.expect(bad != 0, "fault-injected bench exited 0");
  std::filesystem::remove(csv);
  std::filesystem::remove(log);
  if (c.out.ok) {
    c.out.detail = std::to_string(rows) + " sweep rows verify=pass; fault hook exit " + std::to_string(bad);
  }
  return c.out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "storage formula exactness", 1, storage_formula},
      {2, "kernel-oracle equivalence", 60, kernel_oracle},
      {3, "dual-path MTTKRP", 10, dual_path},
      {4, "flag correctness", 5, flag_correctness},
      {5, "determinism and plan invariance", 30, determinism},
      {6, "one-shot memory bound", 10, memory_bound},
      {7, "CP recovery", 30, cp_recovery},
      {8, "pseudoinverse Penrose conditions", 5, penrose},
      {9, "mode-balance structure", 60, mode_balance},
      {10, "CLI end-to-end", 60, cli_end_to_end},
  };
  int failures = 0;
  for (const Criterion& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > cr.limit_seconds) {
      o = {false, "took " + num(secs) + " s, limit " + std::to_string(cr.limit_seconds) + " s"};
    }
    failures += !o.ok;
    std::printf("%s criterion %d: %s (%.2f s) %s\n", o.ok ? "PASS" : "FAIL", cr.id, cr.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
