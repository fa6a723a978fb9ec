// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcoo/coo_tensor.hpp"

namespace fcoo {

enum class OpKind { SpTTM, SpMTTKRP, SpTTMc };

std::string_view to_string(OpKind kind);
/// Parses "spttm", "spmttkrp" or "spttmc" (case-insensitive).
OpKind parse_op_kind(std::string_view name);

/// An operation bound to its target mode (0-based, < 3).
struct Operation {
  OpKind kind = OpKind::SpMTTKRP;
  std::size_t mode = 0;

  friend bool operator==(const Operation&, const Operation&) = default;
};

/// Split of the three modes into product modes (multiplied by a dense matrix)
/// and index modes (addressing the output).
struct ModeSpec {
  ModeList product_modes;
  ModeList index_modes;

  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

ModeSpec mode_spec(Operation op);

/// Flagged coordinate tensor specialized for one (operation, mode) pair.
///
/// Nonzeros are ordered with the index modes as major sort keys, so every
/// distinct index-mode tuple forms a contiguous segment. Only product-mode
/// coordinates are kept per nonzero. `bf` marks segment heads, `sf` marks
/// partitions of `threadlen` nonzeros that begin with a head.
struct FcooTensor {
  Operation op;
  ModeSpec spec;
  std::vector<Index> dims;
  std::size_t nnz = 0;
  std::vector<std::vector<Index>> product_indices;  // one array per product mode
  std::vector<Value> values;
  std::vector<std::uint8_t> bf;   // bit n at byte n / 8, bit n % 8
  std::vector<std::uint32_t> sf;  // bit p at word p / 32, bit p % 32
  std::vector<Index> seg_coords;  // nsegs * |index_modes|
  std::size_t threadlen = 1;
  std::size_t npartitions = 0;

  std::size_t nsegs() const { return seg_coords.size() / spec.index_modes.size(); }
  std::span<const Index> segment_coords(std::size_t s) const {
    const std::size_t w = spec.index_modes.size();
    return {seg_coords.data() + s * w, w};
  }

  bool head(std::size_t n) const { return (bf[n >> 3] >> (n & 7)) & 1u; }
  bool start_flag(std::size_t p) const { return (sf[p >> 5] >> (p & 31)) & 1u; }

  std::size_t partition_begin(std::size_t p) const { return p * threadlen; }
  std::size_t partition_end(std::size_t p) const {
    return std::min(nnz, (p + 1) * threadlen);
  }
};

/// Builds the F-COO form of an order-3 tensor. Sorts (and merges duplicates)
/// with the index modes as major keys.
FcooTensor build_fcoo(const CooTensor& t, Operation op, std::size_t threadlen);

struct StorageBytes {
  std::uint64_t core_bytes = 0;       // product indices, values, bf, sf
  std::uint64_t seg_table_bytes = 0;  // per-segment output coordinates
  std::uint64_t coo_bytes = 0;        // plain COO with 32-bit indices and values
};

StorageBytes storage_bytes(const FcooTensor& f);

/// Recomputes flags and segment table from `t` and throws ConsistencyError on
/// any mismatch with `f`.
void validate_flags(const FcooTensor& f, const CooTensor& t);

}  // namespace fcoo
