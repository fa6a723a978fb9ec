// SPDX-License-Identifier: Apache-2.0
#include "fcoo/oracle.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "fcoo/error.hpp"
#include "fcoo/multilinear.hpp"

namespace fcoo::oracle {

namespace {

std::vector<std::size_t> other_modes(const CooTensor& t, std::size_t mode) {
  if (t.order() != 3) throw ShapeError("oracle: order-3 tensors only");
  if (mode >= 3) throw ArgumentError("oracle: mode out of range");
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < 3; ++m)
    if (m != mode) out.push_back(m);
  return out;
}

void check_rows(const DenseMatrix& u, Index extent, const char* what) {
  if (u.rows() != extent) throw ShapeError(what);
}

}  // namespace

SemiSparseTensor ref_ttm(const CooTensor& t, const DenseMatrix& u, std::size_t mode) {
  if (mode >= t.order()) throw ArgumentError("ref_ttm: mode out of range");
  check_rows(u, t.dim(mode), "ref_ttm: U rows do not match the mode extent");
  const std::size_t R = u.cols();

  std::map<std::vector<Index>, std::vector<double>> fibers;
  for (std::size_t n = 0; n < t.nnz(); ++n) {
    std::vector<Index> key;
    for (std::size_t m = 0; m < t.order(); ++m)
      if (m != mode) key.push_back(t.index(n, m));
    auto& fiber = fibers[key];
    fiber.resize(R, 0.0);
    for (std::size_t r = 0; r < R; ++r) fiber[r] += double{t.value(n)} * u(t.index(n, mode), r);
  }

  SemiSparseTensor out;
  out.dims.assign(t.dims().begin(), t.dims().end());
  out.dims[mode] = static_cast<Index>(R);
  out.dense_mode = mode;
  out.coord_arity = t.order() - 1;
  out.fibers = DenseMatrix(fibers.size(), R);
  std::size_t s = 0;
  for (const auto& [key, fiber] : fibers) {
    out.index_coords.insert(out.index_coords.end(), key.begin(), key.end());
    for (std::size_t r = 0; r < R; ++r) out.fibers(s, r) = fiber[r];
    ++s;
  }
  return out;
}

DenseMatrix ref_mttkrp(const CooTensor& t, const DenseMatrix& b, const DenseMatrix& c, std::size_t mode) {
  const auto others = other_modes(t, mode);
  check_rows(b, t.dim(others[0]), "ref_mttkrp: B rows do not match the mode extent");
  check_rows(c, t.dim(others[1]), "ref_mttkrp: C rows do not match the mode extent");
  if (b.cols() != c.cols()) throw ShapeError("ref_mttkrp: B and C have different ranks");

  DenseMatrix m(t.dim(mode), b.cols());
  for (std::size_t n = 0; n < t.nnz(); ++n) {
    const Index i = t.index(n, mode);
    const Index j = t.index(n, others[0]);
    const Index k = t.index(n, others[1]);
    for (std::size_t r = 0; r < b.cols(); ++r) m(i, r) += double{t.value(n)} * b(j, r) * c(k, r);
  }
  return m;
}

DenseMatrix ref_mttkrp_unfolded(const CooTensor& t, const DenseMatrix& b, const DenseMatrix& c,
                                std::size_t mode) {
  const auto others = other_modes(t, mode);
  check_rows(b, t.dim(others[0]), "ref_mttkrp_unfolded: B rows do not match the mode extent");
  check_rows(c, t.dim(others[1]), "ref_mttkrp_unfolded: C rows do not match the mode extent");
  if (std::uint64_t{t.dim(others[0])} * t.dim(others[1]) > 100'000) {
    throw SizeError("ref_mttkrp_unfolded: unfolded width exceeds 1e5");
  }

  // The lower mode varies fastest along the unfolded columns, so the matching
  // Khatri-Rao product puts the higher mode's factor first.
  const CooMatrix x = matricize(t, mode);
  const DenseMatrix kr = khatri_rao(c, b);
  DenseMatrix m(x.rows, kr.cols());
  for (const auto& e : x.entries) {
    for (std::size_t r = 0; r < kr.cols(); ++r) m(e.row, r) += e.value * kr(e.col, r);
  }
  return m;
}

DenseMatrix ref_ttmc(const CooTensor& t, const DenseMatrix& u2, const DenseMatrix& u3, std::size_t mode) {
  const auto others = other_modes(t, mode);
  check_rows(u2, t.dim(others[0]), "ref_ttmc: U2 rows do not match the mode extent");
  check_rows(u3, t.dim(others[1]), "ref_ttmc: U3 rows do not match the mode extent");

  DenseMatrix y(t.dim(mode), u2.cols() * u3.cols());
  for (std::size_t n = 0; n < t.nnz(); ++n) {
    const Index i = t.index(n, mode);
    DenseMatrix row2(1, u2.cols(), std::vector<double>(u2.row(t.index(n, others[0])).begin(),
                                                      u2.row(t.index(n, others[0])).end()));
    DenseMatrix row3(1, u3.cols(), std::vector<double>(u3.row(t.index(n, others[1])).begin(),
                                                      u3.row(t.index(n, others[1])).end()));
    const DenseMatrix kron = kronecker(row2, row3);
    for (std::size_t col = 0; col < kron.cols(); ++col) y(i, col) += double{t.value(n)} * kron(0, col);
  }
  return y;
}

double relative_error(const SemiSparseTensor& a, const SemiSparseTensor& b) {
  if (a.index_coords != b.index_coords || a.coord_arity != b.coord_arity) {
    return std::numeric_limits<double>::infinity();
  }
  return fcoo::relative_error(a.fibers, b.fibers);
}

}  // namespace fcoo::oracle
