// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fcoo/dense_matrix.hpp"

namespace fcoo {

using Index = std::uint32_t;  // one tensor coordinate
using Value = float;          // stored nonzero value
using ModeList = std::vector<std::size_t>;

/// Order-N sparse tensor in coordinate format.
///
/// Coordinates are zero-based and stored row-major: nonzero `n` occupies
/// `indices[n * order .. (n + 1) * order)`. The constructor validates that
/// every coordinate lies inside its mode's extent. Row order is whatever
/// the producer supplied; use `sort_lex` to canonicalize.
class CooTensor {
 public:
  CooTensor() = default;
  CooTensor(std::vector<Index> dims, std::vector<Index> indices, std::vector<Value> values);

  std::size_t order() const { return dims_.size(); }
  std::size_t nnz() const { return values_.size(); }
  std::span<const Index> dims() const { return dims_; }
  Index dim(std::size_t mode) const { return dims_[mode]; }

  Index index(std::size_t n, std::size_t mode) const { return indices_[n * order() + mode]; }
  std::span<const Index> coords(std::size_t n) const { return {indices_.data() + n * order(), order()}; }
  Value value(std::size_t n) const { return values_[n]; }

  std::span<const Index> indices() const { return indices_; }
  std::span<const Value> values() const { return values_; }

  /// Copy with every value multiplied by `alpha`.
  CooTensor scaled(Value alpha) const;

  friend bool operator==(const CooTensor&, const CooTensor&) = default;

 private:
  std::vector<Index> dims_;
  std::vector<Index> indices_;
  std::vector<Value> values_;
};

/// Sparse matrix in coordinate form, produced by `matricize`.
struct CooMatrix {
  struct Entry {
    std::uint64_t row;
    std::uint64_t col;
    double value;
  };
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<Entry> entries;
};

/// SpTTM output: one dense length-R fiber per distinct index-mode tuple.
struct SemiSparseTensor {
  std::vector<Index> dims;        // extents of the full output (dense mode holds R)
  std::size_t dense_mode = 0;     // mode replaced by the dense fiber
  std::size_t coord_arity = 0;    // number of index modes per tuple
  std::vector<Index> index_coords;  // nsegs * coord_arity, lexicographically sorted
  DenseMatrix fibers;             // nsegs x R

  std::size_t nfibers() const { return fibers.rows(); }
  std::span<const Index> coords(std::size_t s) const {
    return {index_coords.data() + s * coord_arity, coord_arity};
  }
};

/// CP model: `X ~ sum_r lambda_r a_r o b_r o c_r`.
struct KruskalModel {
  std::vector<double> lambda;
  std::vector<DenseMatrix> factors;

  std::size_t rank() const { return lambda.size(); }
  std::size_t order() const { return factors.size(); }
};

/// Stable lexicographic sort using `major_modes` as the key order, merging
/// duplicate coordinates by summing their values.
CooTensor sort_lex(const CooTensor& t, const ModeList& major_modes);

/// Mode-n unfolding. Column of a nonzero is the mixed-radix number formed by
/// the remaining modes, lowest mode varying fastest.
CooMatrix matricize(const CooTensor& t, std::size_t mode);

/// Dense materialization of a Kruskal model; entries with |x| < 1e-12 are
/// dropped. Rejects outputs with more than 1e7 entries.
CooTensor from_kruskal(const KruskalModel& m, std::span<const Index> dims);

}  // namespace fcoo
