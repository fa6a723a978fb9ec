// SPDX-License-Identifier: Apache-2.0
#include "fcoo/generate.hpp"

#include <random>
#include <unordered_set>

#include "fcoo/error.hpp"

namespace fcoo {

CooTensor random_coo(std::span<const Index> dims, std::uint64_t nnz, std::uint64_t seed) {
  if (dims.empty()) throw ShapeError("random_coo: order must be positive");
  std::uint64_t total = 1;
  bool saturated = false;
  for (Index d : dims) {
    if (d == 0) throw ShapeError("random_coo: mode extents must be positive");
    if (__builtin_mul_overflow(total, std::uint64_t{d}, &total)) saturated = true;
  }
  if (!saturated && nnz > total) throw ArgumentError("random_coo: nnz exceeds the number of coordinates");
  if (saturated) throw SizeError("random_coo: coordinate space exceeds 64 bits");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Floyd's sampling: nnz distinct linear positions in [0, total)
  std::vector<std::uint64_t> picked;
  picked.reserve(nnz);
  std::unordered_set<std::uint64_t> taken;
  taken.reserve(nnz * 2);
  for (std::uint64_t j = total - nnz; j < total; ++j) {
    const std::uint64_t x = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    const std::uint64_t pick = taken.insert(x).second ? x : j;
    if (pick == j) taken.insert(j);
    picked.push_back(pick);
  }

  const std::size_t order = dims.size();
  std::vector<Index> indices(nnz * order);
  std::vector<Value> values(nnz);
  for (std::size_t n = 0; n < nnz; ++n) {
    std::uint64_t lin = picked[n];
    for (std::size_t m = order; m-- > 0;) {
      indices[n * order + m] = static_cast<Index>(lin % dims[m]);
      lin /= dims[m];
    }
    values[n] = static_cast<Value>(1.0 - unit(rng));
  }
  return CooTensor(std::vector<Index>(dims.begin(), dims.end()), std::move(indices), std::move(values));
}

KruskalModel random_kruskal(std::span<const Index> dims, std::size_t rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  KruskalModel m;
  m.lambda.assign(rank, 1.0);
  for (Index d : dims) {
    DenseMatrix f(d, rank);
    for (double& x : f.data()) x = normal(rng);
    m.factors.push_back(std::move(f));
  }
  return m;
}

}  // namespace fcoo
