// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include "fcoo/coo_tensor.hpp"

namespace fcoo {

/// `nnz` distinct uniformly sampled coordinates with values in (0, 1].
/// Deterministic for a fixed seed; rows come out unsorted.
CooTensor random_coo(std::span<const Index> dims, std::uint64_t nnz, std::uint64_t seed);

/// Random Kruskal model with standard-normal factor entries and unit weights.
KruskalModel random_kruskal(std::span<const Index> dims, std::size_t rank, std::uint64_t seed);

}  // namespace fcoo
