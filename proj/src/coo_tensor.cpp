// SPDX-License-Identifier: Apache-2.0
#include "fcoo/coo_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "fcoo/error.hpp"

namespace fcoo {

CooTensor::CooTensor(std::vector<Index> dims, std::vector<Index> indices, std::vector<Value> values)
    : dims_(std::move(dims)), indices_(std::move(indices)), values_(std::move(values)) {
  if (dims_.empty()) throw ShapeError("CooTensor: order must be positive");
  for (Index d : dims_) {
    if (d == 0) throw ShapeError("CooTensor: mode extents must be positive");
  }
  if (indices_.size() != values_.size() * dims_.size()) {
    throw ShapeError("CooTensor: index count does not match nnz * order");
  }
  const std::size_t n_order = dims_.size();
  for (std::size_t n = 0; n < values_.size(); ++n) {
    for (std::size_t m = 0; m < n_order; ++m) {
      if (indices_[n * n_order + m] >= dims_[m]) {
        throw ShapeError("CooTensor: coordinate " + std::to_string(indices_[n * n_order + m]) +
                         " out of range for mode " + std::to_string(m));
      }
    }
  }
}

CooTensor CooTensor::scaled(Value alpha) const {
  CooTensor out = *this;
  for (Value& v : out.values_) v *= alpha;
  return out;
}

CooTensor sort_lex(const CooTensor& t, const ModeList& major_modes) {
  const std::size_t order = t.order();
  if (major_modes.size() != order) throw ArgumentError("sort_lex: key list must name every mode");
  std::vector<bool> seen(order, false);
  for (std::size_t m : major_modes) {
    if (m >= order || seen[m]) throw ArgumentError("sort_lex: keys are not a permutation of the modes");
    seen[m] = true;
  }

  std::vector<std::size_t> perm(t.nnz());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    for (std::size_t m : major_modes) {
      const Index ia = t.index(a, m);
      const Index ib = t.index(b, m);
      if (ia != ib) return ia < ib;
    }
    return false;
  };
  std::stable_sort(perm.begin(), perm.end(), less);

  std::vector<Index> indices;
  std::vector<Value> values;
  indices.reserve(t.indices().size());
  values.reserve(t.nnz());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const std::size_t n = perm[k];
    if (!values.empty() && !less(perm[k - 1], n)) {
      // equal to the previous row: merge
      values.back() += t.value(n);
      continue;
    }
    auto c = t.coords(n);
    indices.insert(indices.end(), c.begin(), c.end());
    values.push_back(t.value(n));
  }
  return CooTensor(std::vector<Index>(t.dims().begin(), t.dims().end()), std::move(indices),
                   std::move(values));
}

CooMatrix matricize(const CooTensor& t, std::size_t mode) {
  if (mode >= t.order()) throw ArgumentError("matricize: mode out of range");
  CooMatrix out;
  out.rows = t.dim(mode);

  // stride[m] = product of extents of the non-target modes below m
  std::vector<std::uint64_t> stride(t.order(), 0);
  std::uint64_t width = 1;
  for (std::size_t m = 0; m < t.order(); ++m) {
    if (m == mode) continue;
    stride[m] = width;
    if (__builtin_mul_overflow(width, std::uint64_t{t.dim(m)}, &width)) {
      throw SizeError("matricize: unfolded column count overflows 64 bits");
    }
  }
  out.cols = width;

  out.entries.reserve(t.nnz());
  for (std::size_t n = 0; n < t.nnz(); ++n) {
    std::uint64_t col = 0;
    for (std::size_t m = 0; m < t.order(); ++m) {
      if (m != mode) col += stride[m] * t.index(n, m);
    }
    out.entries.push_back({t.index(n, mode), col, static_cast<double>(t.value(n))});
  }
  return out;
}

CooTensor from_kruskal(const KruskalModel& m, std::span<const Index> dims) {
  const std::size_t order = dims.size();
  if (order == 0 || m.factors.size() != order) {
    throw ShapeError("from_kruskal: factor count does not match order");
  }
  const std::size_t rank = m.rank();
  std::uint64_t total = 1;
  for (std::size_t n = 0; n < order; ++n) {
    if (m.factors[n].rows() != dims[n] || m.factors[n].cols() != rank) {
      throw ShapeError("from_kruskal: factor " + std::to_string(n) + " has the wrong shape");
    }
    total *= dims[n];
    if (total > 10'000'000) throw SizeError("from_kruskal: more than 1e7 dense entries");
  }

  std::vector<Index> indices;
  std::vector<Value> values;
  std::vector<Index> coord(order, 0);
  for (std::uint64_t lin = 0; lin < total; ++lin) {
    double x = 0.0;
    for (std::size_t r = 0; r < rank; ++r) {
      double term = m.lambda[r];
      for (std::size_t n = 0; n < order; ++n) term *= m.factors[n](coord[n], r);
      x += term;
    }
    if (std::abs(x) >= 1e-12) {
      indices.insert(indices.end(), coord.begin(), coord.end());
      values.push_back(static_cast<Value>(x));
    }
    // odometer, last mode fastest so rows come out lexicographically sorted
    for (std::size_t n = order; n-- > 0;) {
      if (++coord[n] < dims[n]) break;
      coord[n] = 0;
    }
  }
  return CooTensor(std::vector<Index>(dims.begin(), dims.end()), std::move(indices), std::move(values));
}

}  // namespace fcoo
