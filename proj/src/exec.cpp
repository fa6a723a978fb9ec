// SPDX-License-Identifier: Apache-2.0
#include "fcoo/exec.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <memory>
#include <string>

#include "fcoo/error.hpp"

namespace fcoo {

PartitionPlan make_plan(const FcooTensor& f, std::size_t group_size, std::size_t col_block) {
  return {f.threadlen, f.npartitions, group_size, col_block};
}

std::vector<double> segmented_scan(std::span<const double> values, std::span<const std::uint8_t> heads) {
  if (values.size() != heads.size()) throw ShapeError("segmented_scan: length mismatch");
  std::vector<double> out(values.size());
  if (values.empty()) return out;
  if (!heads[0]) throw ArgumentError("segmented_scan: first element must start a segment");
  for (std::size_t n = 0; n < values.size(); ++n) {
    out[n] = heads[n] ? values[n] : out[n - 1] + values[n];
  }
  return out;
}

namespace {

// Byte accounting for every auxiliary buffer a kernel allocates.
class ScratchLedger {
 public:
  template <typename T>
  std::vector<T> allocate(std::size_t count) {
    const std::size_t bytes = count * sizeof(T);
    current_ += bytes;
    peak_ = std::max(peak_, current_);
    largest_ = std::max(largest_, bytes);
    return std::vector<T>(count);
  }
  std::size_t peak() const { return peak_; }
  std::size_t largest() const { return largest_; }

 private:
  std::size_t current_ = 0;
  std::size_t peak_ = 0;
  std::size_t largest_ = 0;
};

// Carry-resolution view of one partition, or of a whole group of them.
struct Link {
  bool continues = false;  // leading run belongs to a segment opened earlier
  double* lead = nullptr;  // partial sum of that leading run
  bool has_head = false;   // at least one segment starts inside
  bool tail_open = false;  // last segment started inside runs past the end
  std::size_t tail_seg = 0;
  double* tail = nullptr;
};

void add_into(double* dst, const double* src, std::size_t w) {
  for (std::size_t c = 0; c < w; ++c) dst[c] += src[c];
}

// Left-to-right sweep over consecutive links. An open segment closes at the
// next head; segments that close inside the span are handed to `sink`; the returned link summarizes what is still open
// at either edge.
template <typename LinkAt, typename Sink>
Link resolve(std::size_t count, const LinkAt& link_at, std::size_t w, const Sink& sink) {
  Link out;
  double* open = nullptr;
  std::size_t open_seg = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const Link l = link_at(i);
    if (i == 0) {
      out.continues = l.continues;
      out.lead = l.lead;
    }
    if (l.continues) {
      if (open) {
        add_into(open, l.lead, w);
      } else if (i > 0) {
        if (out.has_head) throw ConsistencyError("carry resolution: continuation without an open segment");
        add_into(out.lead, l.lead, w);
      }
    }
    if (l.has_head) {
      if (open) {
        sink(open_seg, static_cast<const double*>(open));
        open = nullptr;
      }
      out.has_head = true;
      if (l.tail_open) {
        open = l.tail;
        open_seg = l.tail_seg;
      }
    }
  }
  out.tail_open = open != nullptr;
  out.tail = open;
  out.tail_seg = open_seg;
  return out;
}

class WriteOnceMap {
 public:
  WriteOnceMap(bool enabled, std::size_t slots)
      : counts_(enabled ? std::make_unique<std::atomic<std::uint32_t>[]>(slots) : nullptr), slots_(slots) {}
  void mark(std::size_t slot) {
    if (counts_) counts_[slot].fetch_add(1, std::memory_order_relaxed);
  }
  void verify() const {
    if (!counts_) return;
    for (std::size_t s = 0; s < slots_; ++s) {
      const auto n = counts_[s].load();
      if (n != 1) {
        throw ConsistencyError("write-once check: output slot " + std::to_string(s) + " written " +
                               std::to_string(n) + " times");
      }
    }
  }

 private:
  std::unique_ptr<std::atomic<std::uint32_t>[]> counts_;
  std::size_t slots_;
};

void run_tasks(const ExecContext& ctx, std::size_t ntasks, const std::function<void(std::size_t)>& task) {
  if (ctx.pool) {
    ctx.pool->run(ntasks, task);
  } else {
    for (std::size_t i = 0; i < ntasks; ++i) task(i);
  }
}

void check_plan(const FcooTensor& f, const PartitionPlan& plan) {
  if (plan.threadlen != f.threadlen || plan.npartitions != f.npartitions) {
    throw ArgumentError("partition plan does not match the F-COO partitioning");
  }
  if (plan.group_size == 0) throw ArgumentError("partition plan: group_size must be at least 1");
}

// The one-shot engine shared by every kernel.
//
// `product(n, c0, c1, acc)` adds nonzero n's contribution to output columns
// [c0, c1) into acc. `sink(seg, c0, c1, acc)` stores a finished segment.
// Phase 1 walks each (partition, column block) once, scattering segments that
// start and end inside the partition and parking the leading and trailing
// partial sums. Phase 2 resolves carries inside each group of partitions and
// phase 3 across groups, both in fixed left-to-right order.
template <typename Product, typename Sink>
void run_segmented(const FcooTensor& f, const PartitionPlan& plan, std::size_t width, const ExecContext& ctx,
                   ExecStats* stats, const Product& product, const Sink& sink) {
  check_plan(f, plan);
  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t P = f.npartitions;
  const std::size_t cb = plan.col_block == 0 ? width : std::min(plan.col_block, width);
  const std::size_t nblocks = (width + cb - 1) / cb;
  const std::size_t G = plan.group_size;
  const std::size_t ngroups = (P + G - 1) / G;

  ScratchLedger ledger;
  auto seg_begin = ledger.allocate<std::uint32_t>(P + 1);
  auto lead = ledger.allocate<double>(P * width);
  auto tail = ledger.allocate<double>(P * width);
  WriteOnceMap writes(ctx.options.check_write_once, f.nsegs() * nblocks);

  auto emit = [&](std::size_t seg, std::size_t block, const double* acc) {
    const std::size_t c0 = block * cb;
    const std::size_t c1 = std::min(width, c0 + cb);
    writes.mark(seg * nblocks + block);
    sink(seg, c0, c1, acc);
  };

  // segment ordinal of each partition's first head
  run_tasks(ctx, P, [&](std::size_t p) {
    std::uint32_t heads = 0;
    for (std::size_t n = f.partition_begin(p); n < f.partition_end(p); ++n) heads += f.head(n);
    seg_begin[p + 1] = heads;
  });
  for (std::size_t p = 0; p < P; ++p) seg_begin[p + 1] += seg_begin[p];

  auto link_of = [&](std::size_t p, std::size_t block) {
    Link l;
    l.continues = !f.start_flag(p);
    l.lead = lead.data() + p * width + block * cb;
    l.has_head = seg_begin[p + 1] > seg_begin[p];
    l.tail_open = l.has_head && p + 1 < P && !f.start_flag(p + 1);
    l.tail_seg = l.has_head ? seg_begin[p + 1] - 1 : 0;
    l.tail = tail.data() + p * width + block * cb;
    return l;
  };

  run_tasks(ctx, P * nblocks, [&](std::size_t task) {
    const std::size_t p = task / nblocks;
    const std::size_t block = task % nblocks;
    const std::size_t c0 = block * cb;
    const std::size_t c1 = std::min(width, c0 + cb);
    const std::size_t w = c1 - c0;
    double* lead_acc = lead.data() + p * width + c0;
    double* tail_acc = tail.data() + p * width + c0;

    double* acc = lead_acc;
    std::size_t next_seg = seg_begin[p];
    std::size_t seg = 0;
    bool have_seg = false;
    for (std::size_t n = f.partition_begin(p); n < f.partition_end(p); ++n) {
      if (f.head(n)) {
        if (have_seg) {
          emit(seg, block, tail_acc);
          std::fill_n(tail_acc, w, 0.0);
        }
        acc = tail_acc;
        have_seg = true;
        seg = next_seg++;
      }
      product(n, c0, c1, acc);
    }
    if (have_seg && !link_of(p, block).tail_open) emit(seg, block, tail_acc);
  });

  auto group_links = ledger.allocate<Link>(ngroups * nblocks);
  run_tasks(ctx, ngroups * nblocks, [&](std::size_t task) {
    const std::size_t g = task / nblocks;
    const std::size_t block = task % nblocks;
    const std::size_t c0 = block * cb;
    const std::size_t w = std::min(width, c0 + cb) - c0;
    const std::size_t first = g * G;
    const std::size_t last = std::min(P, first + G);
    group_links[block * ngroups + g] = resolve(
        last - first, [&](std::size_t i) { return link_of(first + i, block); }, w,
        [&](std::size_t seg, const double* acc) { emit(seg, block, acc); });
  });

  run_tasks(ctx, nblocks, [&](std::size_t block) {
    const std::size_t c0 = block * cb;
    const std::size_t w = std::min(width, c0 + cb) - c0;
    const Link* links = group_links.data() + block * ngroups;
    const Link top = resolve(
        ngroups, [&](std::size_t g) { return links[g]; }, w,
        [&](std::size_t seg, const double* acc) { emit(seg, block, acc); });
    if (top.continues) throw ConsistencyError("carry resolution: first partition continues a segment");
    // the last segment runs to the end of the tensor
    if (top.tail_open) emit(top.tail_seg, block, top.tail);
  });

  writes.verify();

  if (stats) {
    stats->nnz = f.nnz;
    stats->partitions = P;
    stats->segments = f.nsegs();
    stats->carry_events = 0;
    for (std::size_t p = 1; p < P; ++p) stats->carry_events += !f.start_flag(p);
    stats->peak_scratch_bytes = ledger.peak();
    stats->largest_scratch_buffer_bytes = ledger.largest();
    stats->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
}

void check_op(const FcooTensor& f, OpKind kind) {
  if (f.op.kind != kind) {
    throw ArgumentError(std::string("kernel expects F-COO built for ") + std::string(to_string(kind)) +
                        ", got " + std::string(to_string(f.op.kind)));
  }
}

void check_factor(const DenseMatrix& u, Index extent, const char* what) {
  if (u.rows() != extent) throw ShapeError(std::string(what) + ": row count does not match the mode extent");
  if (u.cols() == 0) throw ShapeError(std::string(what) + ": needs at least one column");
}

}  // namespace

SemiSparseTensor sp_ttm(const FcooTensor& f, const DenseMatrix& u, const PartitionPlan& plan,
                        const ExecContext& ctx, ExecStats* stats) {
  check_op(f, OpKind::SpTTM);
  const std::size_t pmode = f.spec.product_modes[0];
  check_factor(u, f.dims[pmode], "sp_ttm");
  const std::size_t R = u.cols();

  SemiSparseTensor out;
  out.dims = f.dims;
  out.dims[pmode] = static_cast<Index>(R);
  out.dense_mode = pmode;
  out.coord_arity = f.spec.index_modes.size();
  out.index_coords = f.seg_coords;
  out.fibers = DenseMatrix(f.nsegs(), R);

  const Index* kidx = f.product_indices[0].data();
  const Value* vals = f.values.data();
  run_segmented(
      f, plan, R, ctx, stats,
      [&](std::size_t n, std::size_t c0, std::size_t c1, double* acc) {
        const double v = vals[n];
        const double* urow = u.row(kidx[n]).data();
        for (std::size_t c = c0; c < c1; ++c) acc[c - c0] += v * urow[c];
      },
      [&](std::size_t seg, std::size_t c0, std::size_t c1, const double* acc) {
        std::copy(acc, acc + (c1 - c0), out.fibers.row(seg).data() + c0);
      });

  if (ctx.options.inject_fault && out.fibers.size() > 0) out.fibers.data()[0] += 1.0;
  return out;
}

DenseMatrix sp_mttkrp(const FcooTensor& f, const DenseMatrix& b, const DenseMatrix& c,
                      const PartitionPlan& plan, const ExecContext& ctx, ExecStats* stats) {
  check_op(f, OpKind::SpMTTKRP);
  check_factor(b, f.dims[f.spec.product_modes[0]], "sp_mttkrp B");
  check_factor(c, f.dims[f.spec.product_modes[1]], "sp_mttkrp C");
  if (b.cols() != c.cols()) throw ShapeError("sp_mttkrp: B and C have different ranks");
  const std::size_t R = b.cols();

  DenseMatrix out(f.dims[f.spec.index_modes[0]], R);
  const Index* jidx = f.product_indices[0].data();
  const Index* kidx = f.product_indices[1].data();
  const Value* vals = f.values.data();
  run_segmented(
      f, plan, R, ctx, stats,
      [&](std::size_t n, std::size_t c0, std::size_t c1, double* acc) {
        const double v = vals[n];
        const double* brow = b.row(jidx[n]).data();
        const double* crow = c.row(kidx[n]).data();
        for (std::size_t r = c0; r < c1; ++r) acc[r - c0] += v * (brow[r] * crow[r]);
      },
      [&](std::size_t seg, std::size_t c0, std::size_t c1, const double* acc) {
        std::copy(acc, acc + (c1 - c0), out.row(f.seg_coords[seg]).data() + c0);
      });

  if (ctx.options.inject_fault && out.size() > 0) out.data()[0] += 1.0;
  return out;
}

DenseMatrix sp_ttmc(const FcooTensor& f, const DenseMatrix& u2, const DenseMatrix& u3,
                    const PartitionPlan& plan, const ExecContext& ctx, ExecStats* stats) {
  check_op(f, OpKind::SpTTMc);
  check_factor(u2, f.dims[f.spec.product_modes[0]], "sp_ttmc U2");
  check_factor(u3, f.dims[f.spec.product_modes[1]], "sp_ttmc U3");
  const std::size_t R3 = u3.cols();
  const std::size_t width = u2.cols() * R3;

  DenseMatrix out(f.dims[f.spec.index_modes[0]], width);
  const Index* jidx = f.product_indices[0].data();
  const Index* kidx = f.product_indices[1].data();
  const Value* vals = f.values.data();
  run_segmented(
      f, plan, width, ctx, stats,
      [&](std::size_t n, std::size_t c0, std::size_t c1, double* acc) {
        const double v = vals[n];
        const double* row2 = u2.row(jidx[n]).data();
        const double* row3 = u3.row(kidx[n]).data();
        std::size_t a = c0 / R3;
        std::size_t k = c0 % R3;
        for (std::size_t col = c0; col < c1; ++col) {
          acc[col - c0] += v * (row2[a] * row3[k]);
          if (++k == R3) {
            k = 0;
            ++a;
          }
        }
      },
      [&](std::size_t seg, std::size_t c0, std::size_t c1, const double* acc) {
        std::copy(acc, acc + (c1 - c0), out.row(f.seg_coords[seg]).data() + c0);
      });

  if (ctx.options.inject_fault && out.size() > 0) out.data()[0] += 1.0;
  return out;
}

}  // namespace fcoo
