// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fcoo/coo_tensor.hpp"
#include "fcoo/dense_matrix.hpp"
#include "fcoo/fcoo_tensor.hpp"
#include "fcoo/worker_pool.hpp"

namespace fcoo {

/// Work decomposition for one kernel call.
///
/// Nonzeros are cut into `npartitions` runs of `threadlen` (the last may be
/// shorter); partitions are grouped `group_size` at a time for the two-level
/// carry sweep; output columns are split into blocks of `col_block` (0 means
/// a single block spanning all columns).
struct PartitionPlan {
  std::size_t threadlen = 1;
  std::size_t npartitions = 0;
  std::size_t group_size = 32;
  std::size_t col_block = 0;
};

/// Plan matching the partitioning baked into `f`.
PartitionPlan make_plan(const FcooTensor& f, std::size_t group_size = 32, std::size_t col_block = 0);

struct ExecStats {
  std::size_t nnz = 0;
  std::size_t partitions = 0;
  std::size_t segments = 0;
  std::size_t carry_events = 0;      // partitions whose leading run continues a segment
  std::size_t peak_scratch_bytes = 0;
  std::size_t largest_scratch_buffer_bytes = 0;
  double wall_seconds = 0.0;
};

struct ExecOptions {
  /// Counts writes per (segment, column block) and throws ConsistencyError
  /// unless each is written exactly once.
  bool check_write_once = false;
  /// Test hook: perturbs the first output element after the kernel finishes.
  bool inject_fault = false;
};

/// Where a kernel runs. A null pool executes every task on the calling thread.
struct ExecContext {
  WorkerPool* pool = nullptr;
  ExecOptions options;
};

/// Inclusive segmented prefix sum; a set `heads[n]` restarts the sum at n.
std::vector<double> segmented_scan(std::span<const double> values, std::span<const std::uint8_t> heads);

/// Y(i, j, :) = sum_k X(i, j, k) U(k, :) for the product mode of `f`.
SemiSparseTensor sp_ttm(const FcooTensor& f, const DenseMatrix& u, const PartitionPlan& plan,
                        const ExecContext& ctx = {}, ExecStats* stats = nullptr);

/// M(i, :) = sum X(i, j, k) (B(j, :) * C(k, :)), where B and C belong to the
/// first and second product modes of `f`.
DenseMatrix sp_mttkrp(const FcooTensor& f, const DenseMatrix& b, const DenseMatrix& c,
                      const PartitionPlan& plan, const ExecContext& ctx = {},
                      ExecStats* stats = nullptr);

/// Y(i, :) = sum X(i, j, k) (U2(j, :) kron U3(k, :)); output is I x (R2 * R3).
DenseMatrix sp_ttmc(const FcooTensor& f, const DenseMatrix& u2, const DenseMatrix& u3,
                    const PartitionPlan& plan, const ExecContext& ctx = {},
                    ExecStats* stats = nullptr);

}  // namespace fcoo
