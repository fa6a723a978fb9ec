// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fcoo/coo_tensor.hpp"
#include "fcoo/dense_matrix.hpp"
#include "fcoo/exec.hpp"

namespace fcoo {

struct CpConfig {
  std::size_t rank = 8;
  std::size_t max_iters = 50;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  std::size_t threadlen = 16;
  std::size_t group_size = 32;
  /// Record the fit after every single-mode update, not only per iteration.
  bool track_half_steps = false;
};

struct CpResult {
  KruskalModel model;
  std::vector<double> fit_trace;       // one entry per iteration
  std::vector<double> half_step_fits;  // 3 per iteration when tracked
  std::vector<std::array<double, 3>> mode_seconds;  // MTTKRP wall time per mode and iteration
  std::array<std::size_t, 3> mode_nnz{};            // nonzeros processed by each mode's kernel
  std::size_t iterations = 0;
  std::vector<std::string> warnings;
};

/// A^T A.
DenseMatrix gram(const DenseMatrix& a);

/// Moore-Penrose pseudoinverse of a symmetric matrix from its cyclic Jacobi
/// eigendecomposition. Eigenvalues at or below R * eps * max|lambda| are
/// treated as zero.
DenseMatrix pinv_spd(const DenseMatrix& g);

/// Divides every column by its 2-norm. Zero columns stay zero with norm 0.
std::pair<DenseMatrix, std::vector<double>> normalize_columns(const DenseMatrix& a);

/// 1 - ||X - Xhat||_F / ||X||_F, evaluated without materializing Xhat.
double compute_fit(const CooTensor& t, const KruskalModel& m);

/// CP-ALS on an order-3 tensor using the F-COO MTTKRP kernel for every mode.
CpResult cp_als(const CooTensor& t, const CpConfig& cfg, const ExecContext& ctx = {});

}  // namespace fcoo
