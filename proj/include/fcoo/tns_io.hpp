// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fcoo/coo_tensor.hpp"

namespace fcoo {

/// Reads a FROSTT `.tns` file (1-based indices, `#` comments). Extents are the
/// per-mode maxima unless `dims_override` is given, in which case every index
/// must fit inside it.
CooTensor load_tns(const std::filesystem::path& path,
                   const std::optional<std::vector<Index>>& dims_override = std::nullopt);
CooTensor read_tns(std::istream& in,
                   const std::optional<std::vector<Index>>& dims_override = std::nullopt);

/// Writes 1-based FROSTT text in current row order, values in shortest
/// round-trip form.
void save_tns(const CooTensor& t, const std::filesystem::path& path);
void write_tns(const CooTensor& t, std::ostream& out);

/// Binary cache: magic, order, dims, nnz, indices, values (little endian).
void save_binary(const CooTensor& t, const std::filesystem::path& path);
CooTensor load_binary(const std::filesystem::path& path);

}  // namespace fcoo
