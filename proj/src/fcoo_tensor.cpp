// SPDX-License-Identifier: Apache-2.0
#include "fcoo/fcoo_tensor.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "fcoo/error.hpp"

namespace fcoo {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::SpTTM: return "spttm";
    case OpKind::SpMTTKRP: return "spmttkrp";
    case OpKind::SpTTMc: return "spttmc";
  }
  return "unknown";
}

OpKind parse_op_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "spttm") return OpKind::SpTTM;
  if (lower == "spmttkrp") return OpKind::SpMTTKRP;
  if (lower == "spttmc") return OpKind::SpTTMc;
  throw ArgumentError("unknown operation '" + std::string(name) + "'");
}

ModeSpec mode_spec(Operation op) {
  if (op.mode >= 3) throw ArgumentError("mode_spec: mode must be 0, 1 or 2");
  ModeList others;
  for (std::size_t m = 0; m < 3; ++m) {
    if (m != op.mode) others.push_back(m);
  }
  if (op.kind == OpKind::SpTTM) return {{op.mode}, others};
  return {others, {op.mode}};
}

namespace {

struct Flags {
  std::vector<std::uint8_t> bf;
  std::vector<std::uint32_t> sf;
  std::vector<Index> seg_coords;
};

// Flags computed straight from the definition on an index-mode-sorted tensor.
Flags compute_flags(const CooTensor& sorted, const ModeList& index_modes, std::size_t threadlen) {
  const std::size_t nnz = sorted.nnz();
  const std::size_t npart = (nnz + threadlen - 1) / threadlen;
  Flags f;
  f.bf.assign((nnz + 7) / 8, 0);
  f.sf.assign((npart + 31) / 32, 0);
  for (std::size_t n = 0; n < nnz; ++n) {
    bool head = (n == 0);
    for (std::size_t m : index_modes) {
      if (head) break;
      head = sorted.index(n, m) != sorted.index(n - 1, m);
    }
    if (!head) continue;
    f.bf[n / 8] |= static_cast<std::uint8_t>(1u << (n % 8));
    for (std::size_t m : index_modes) f.seg_coords.push_back(sorted.index(n, m));
    if (n % threadlen == 0) {
      const std::size_t p = n / threadlen;
      f.sf[p / 32] |= 1u << (p % 32);
    }
  }
  return f;
}

ModeList sort_keys(const ModeSpec& spec) {
  ModeList keys = spec.index_modes;
  keys.insert(keys.end(), spec.product_modes.begin(), spec.product_modes.end());
  return keys;
}

}  // namespace

FcooTensor build_fcoo(const CooTensor& t, Operation op, std::size_t threadlen) {
  if (t.order() != 3) throw ShapeError("build_fcoo: only order-3 tensors are supported");
  if (t.nnz() == 0) throw ArgumentError("build_fcoo: tensor has no nonzeros");
  if (threadlen == 0) throw ArgumentError("build_fcoo: threadlen must be at least 1");

  FcooTensor f;
  f.op = op;
  f.spec = mode_spec(op);
  f.dims.assign(t.dims().begin(), t.dims().end());

  const CooTensor sorted = sort_lex(t, sort_keys(f.spec));
  f.nnz = sorted.nnz();
  f.threadlen = threadlen;
  f.npartitions = (f.nnz + threadlen - 1) / threadlen;

  f.product_indices.resize(f.spec.product_modes.size());
  for (std::size_t p = 0; p < f.spec.product_modes.size(); ++p) {
    const std::size_t m = f.spec.product_modes[p];
    auto& arr = f.product_indices[p];
    arr.resize(f.nnz);
    for (std::size_t n = 0; n < f.nnz; ++n) arr[n] = sorted.index(n, m);
  }
  f.values.assign(sorted.values().begin(), sorted.values().end());

  Flags flags = compute_flags(sorted, f.spec.index_modes, threadlen);
  f.bf = std::move(flags.bf);
  f.sf = std::move(flags.sf);
  f.seg_coords = std::move(flags.seg_coords);
  return f;
}

StorageBytes storage_bytes(const FcooTensor& f) {
  StorageBytes s;
  const std::uint64_t nnz = f.nnz;
  s.core_bytes = (4 * f.spec.product_modes.size() + 4) * nnz + (nnz + 7) / 8 +
                 4 * ((f.npartitions + 31) / 32);
  s.seg_table_bytes = 4 * std::uint64_t{f.seg_coords.size()};
  s.coo_bytes = (4 * f.dims.size() + 4) * nnz;
  return s;
}

void validate_flags(const FcooTensor& f, const CooTensor& t) {
  const CooTensor sorted = sort_lex(t, sort_keys(f.spec));
  const std::size_t nnz = sorted.nnz();
  if (nnz != f.nnz || f.values.size() != nnz) {
    throw ConsistencyError("validate_flags: nnz differs from the source tensor");
  }
  if (f.npartitions != (nnz + f.threadlen - 1) / f.threadlen) {
    throw ConsistencyError("validate_flags: partition count does not match threadlen");
  }
  if (f.bf.size() != (nnz + 7) / 8 || f.sf.size() != (f.npartitions + 31) / 32) {
    throw ConsistencyError("validate_flags: flag array length mismatch");
  }

  std::size_t seg = 0;
  const std::size_t arity = f.spec.index_modes.size();
  for (std::size_t n = 0; n < nnz; ++n) {
    bool differs = (n == 0);
    for (std::size_t m : f.spec.index_modes) {
      differs = differs || sorted.index(n, m) != sorted.index(n - 1, m);
    }
    if (f.head(n) != differs) {
      throw ConsistencyError("validate_flags: bit-flag mismatch at nonzero " + std::to_string(n));
    }
    if (differs) {
      if ((seg + 1) * arity > f.seg_coords.size()) {
        throw ConsistencyError("validate_flags: segment table too short");
      }
      for (std::size_t k = 0; k < arity; ++k) {
        if (f.seg_coords[seg * arity + k] != sorted.index(n, f.spec.index_modes[k])) {
          throw ConsistencyError("validate_flags: segment table mismatch at segment " + std::to_string(seg));
        }
      }
      ++seg;
    }
    if (f.values[n] != sorted.value(n)) {
      throw ConsistencyError("validate_flags: value mismatch at nonzero " + std::to_string(n));
    }
    for (std::size_t p = 0; p < f.spec.product_modes.size(); ++p) {
      if (f.product_indices[p][n] != sorted.index(n, f.spec.product_modes[p])) {
        throw ConsistencyError("validate_flags: product index mismatch at nonzero " + std::to_string(n));
      }
    }
  }
  if (seg * arity != f.seg_coords.size()) throw ConsistencyError("validate_flags: segment table too long");

  for (std::size_t p = 0; p < f.npartitions; ++p) {
    if (f.start_flag(p) != f.head(p * f.threadlen)) {
      throw ConsistencyError("validate_flags: start-flag mismatch at partition " + std::to_string(p));
    }
  }
  // padding bits past the last nonzero / partition must stay clear
  for (std::size_t n = nnz; n < f.bf.size() * 8; ++n) {
    if (f.head(n)) throw ConsistencyError("validate_flags: stray bit-flag padding");
  }
  for (std::size_t p = f.npartitions; p < f.sf.size() * 32; ++p) {
    if (f.start_flag(p)) throw ConsistencyError("validate_flags: stray start-flag padding");
  }
}

}  // namespace fcoo
