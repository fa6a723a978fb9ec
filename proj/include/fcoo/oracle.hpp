// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "fcoo/coo_tensor.hpp"
#include "fcoo/dense_matrix.hpp"

// Straightforward reference kernels. Nothing here shares accumulation code
// with exec.cpp; they are the ground truth the fast kernels are tested against.
namespace fcoo::oracle {

/// Per-nonzero accumulation into a coordinate-keyed map of fibers.
SemiSparseTensor ref_ttm(const CooTensor& t, const DenseMatrix& u, std::size_t mode);

/// Direct loop over nonzeros. `b` and `c` are the factors of the two
/// non-target modes in ascending mode order.
DenseMatrix ref_mttkrp(const CooTensor& t, const DenseMatrix& b, const DenseMatrix& c, std::size_t mode);

/// Unfolded path: matricize, build the explicit Khatri-Rao product, multiply.
/// Throws SizeError when the unfolded width exceeds 1e5.
DenseMatrix ref_mttkrp_unfolded(const CooTensor& t, const DenseMatrix& b, const DenseMatrix& c,
                                std::size_t mode);

DenseMatrix ref_ttmc(const CooTensor& t, const DenseMatrix& u2, const DenseMatrix& u3, std::size_t mode);

/// Relative Frobenius distance between two SpTTM outputs. Coordinates must
/// match exactly; returns +inf otherwise.
double relative_error(const SemiSparseTensor& a, const SemiSparseTensor& b);

}  // namespace fcoo::oracle
