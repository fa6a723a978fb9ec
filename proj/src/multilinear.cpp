// SPDX-License-Identifier: Apache-2.0
#include "fcoo/multilinear.hpp"

#include <limits>

#include "fcoo/error.hpp"

namespace fcoo {

namespace {

std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  std::size_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw SizeError(what);
  return out;
}

}  // namespace

DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t rows = checked_mul(a.rows(), b.rows(), "kronecker: row count overflows");
  const std::size_t cols = checked_mul(a.cols(), b.cols(), "kronecker: column count overflows");
  checked_mul(rows, cols, "kronecker: element count overflows");
  DenseMatrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

DenseMatrix khatri_rao(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("khatri_rao: column counts differ");
  const std::size_t rows = checked_mul(a.rows(), b.rows(), "khatri_rao: row count overflows");
  checked_mul(rows, a.cols(), "khatri_rao: element count overflows");
  DenseMatrix out(rows, a.cols());
  for (std::size_t j = 0; j < a.rows(); ++j)
    for (std::size_t jj = 0; jj < b.rows(); ++jj) {
      auto dst = out.row(j * b.rows() + jj);
      for (std::size_t r = 0; r < a.cols(); ++r) dst[r] = a(j, r) * b(jj, r);
    }
  return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("hadamard: shape mismatch");
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t n = 0; n < a.size(); ++n) out.data()[n] = a.data()[n] * b.data()[n];
  return out;
}

}  // namespace fcoo
