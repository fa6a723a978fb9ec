// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fcoo/dense_matrix.hpp"

namespace fcoo {

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b);

/// Column-wise Kronecker product. Row `j * b.rows() + jj` of column r holds
/// a(j, r) * b(jj, r).
DenseMatrix khatri_rao(const DenseMatrix& a, const DenseMatrix& b);

/// Elementwise product of equally shaped matrices.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace fcoo
