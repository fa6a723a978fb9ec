// SPDX-License-Identifier: Apache-2.0
#include "fcoo/cp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "fcoo/error.hpp"
#include "fcoo/fcoo_tensor.hpp"
#include "fcoo/multilinear.hpp"

namespace fcoo {

DenseMatrix gram(const DenseMatrix& a) {
  const std::size_t R = a.cols();
  DenseMatrix g(R, R);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t p = 0; p < R; ++p)
      for (std::size_t q = p; q < R; ++q) g(p, q) += row[p] * row[q];
  }
  for (std::size_t p = 0; p < R; ++p)
    for (std::size_t q = 0; q < p; ++q) g(p, q) = g(q, p);
  return g;
}

namespace {

struct EigenPairs {
  std::vector<double> values;
  DenseMatrix vectors;  // column i pairs with values[i]
};

// Cyclic Jacobi: sweep every (p, q) pair, zeroing a(p, q) with one rotation,
// until the off-diagonal mass drops below 1e-12 * ||g||_F.
EigenPairs jacobi_eigen(const DenseMatrix& g) {
  const std::size_t n = g.rows();
  DenseMatrix a = g;
  DenseMatrix v = DenseMatrix::identity(n);
  const double threshold = 1e-12 * frobenius_norm(g);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (p != q) s += a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  EigenPairs e;
  e.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.values[i] = a(i, i);
  e.vectors = std::move(v);
  return e;
}

}  // namespace

DenseMatrix pinv_spd(const DenseMatrix& g) {
  if (g.rows() != g.cols()) throw ShapeError("pinv_spd: matrix is not square");
  const std::size_t n = g.rows();
  const double norm = frobenius_norm(g);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q)
      if (std::abs(g(p, q) - g(q, p)) > 1e-8 * norm) throw ArgumentError("pinv_spd: matrix is not symmetric");

  const EigenPairs e = jacobi_eigen(g);
  double lmax = 0.0;
  for (double l : e.values) lmax = std::max(lmax, std::abs(l));
  const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * lmax;

  std::vector<double> inv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (e.values[i] > cutoff) inv[i] = 1.0 / e.values[i];

  DenseMatrix out(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += e.vectors(p, i) * inv[i] * e.vectors(q, i);
      out(p, q) = s;
      out(q, p) = s;
    }
  return out;
}

std::pair<DenseMatrix, std::vector<double>> normalize_columns(const DenseMatrix& a) {
  DenseMatrix out = a;
  std::vector<double> norms(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t r = 0; r < a.cols(); ++r) norms[r] += a(i, r) * a(i, r);
  for (double& x : norms) x = std::sqrt(x);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t r = 0; r < a.cols(); ++r)
      if (norms[r] > 0.0) out(i, r) /= norms[r];
  return {std::move(out), std::move(norms)};
}

double compute_fit(const CooTensor& t, const KruskalModel& m) {
  if (m.order() != t.order()) throw ShapeError("compute_fit: model order differs from tensor order");
  const std::size_t R = m.rank();
  for (std::size_t n = 0; n < m.order(); ++n) {
    if (m.factors[n].rows() != t.dim(n) || m.factors[n].cols() != R) {
      throw ShapeError("compute_fit: factor shape does not match the tensor");
    }
  }

  double norm_x2 = 0.0;
  double inner = 0.0;
  for (std::size_t n = 0; n < t.nnz(); ++n) {
    const double v = t.value(n);
    norm_x2 += v * v;
    double xhat = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      double term = m.lambda[r];
      for (std::size_t mode = 0; mode < t.order(); ++mode) term *= m.factors[mode](t.index(n, mode), r);
      xhat += term;
    }
    inner += v * xhat;
  }
  if (norm_x2 == 0.0) throw ArgumentError("compute_fit: tensor norm is zero");

  DenseMatrix g(R, R, 1.0);
  for (const auto& f : m.factors) g = hadamard(g, gram(f));
  double norm_m2 = 0.0;
  for (std::size_t p = 0; p < R; ++p)
    for (std::size_t q = 0; q < R; ++q) norm_m2 += m.lambda[p] * g(p, q) * m.lambda[q];

  const double resid2 = std::max(0.0, norm_x2 + norm_m2 - 2.0 * inner);
  return 1.0 - std::sqrt(resid2) / std::sqrt(norm_x2);
}

namespace {

bool all_finite(const DenseMatrix& a) {
  return std::all_of(a.data().begin(), a.data().end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

CpResult cp_als(const CooTensor& t, const CpConfig& cfg, const ExecContext& ctx) {
  if (t.order() != 3) throw ShapeError("cp_als: order-3 tensors only");
  if (t.nnz() == 0) throw ArgumentError("cp_als: tensor has no nonzeros");
  if (cfg.rank == 0) throw ArgumentError("cp_als: rank must be at least 1");
  if (cfg.max_iters == 0) throw ArgumentError("cp_als: max_iters must be at least 1");
  if (!(cfg.tol >= 0.0)) throw ArgumentError("cp_als: tol must be non-negative");
  for (Value v : t.values()) {
    if (!std::isfinite(v)) throw NumericError("cp_als: tensor contains non-finite values");
  }

  CpResult result;
  const std::size_t R = cfg.rank;
  for (std::size_t n = 0; n < 3; ++n) {
    if (R > t.dim(n)) {
      result.warnings.push_back("rank " + std::to_string(R) + " exceeds extent " + std::to_string(t.dim(n)) +
                                " of mode " + std::to_string(n + 1) + "; Gram products will be rank deficient");
    }
  }

  std::array<FcooTensor, 3> fcoo;
  std::array<PartitionPlan, 3> plans;
  for (std::size_t n = 0; n < 3; ++n) {
    fcoo[n] = build_fcoo(t, {OpKind::SpMTTKRP, n}, cfg.threadlen);
    plans[n] = make_plan(fcoo[n], cfg.group_size);
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  KruskalModel& model = result.model;
  model.lambda.assign(R, 1.0);
  std::array<DenseMatrix, 3> grams;
  for (std::size_t n = 0; n < 3; ++n) {
    DenseMatrix f(t.dim(n), R);
    for (double& x : f.data()) x = unit(rng);
    model.factors.push_back(std::move(f));
    grams[n] = gram(model.factors[n]);
  }

  double prev_fit = 0.0;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    std::array<double, 3> seconds{};
    for (std::size_t n = 0; n < 3; ++n) {
      const std::size_t o0 = n == 0 ? 1 : 0;
      const std::size_t o1 = n == 2 ? 1 : 2;

      ExecStats stats;
      const DenseMatrix m = sp_mttkrp(fcoo[n], model.factors[o0], model.factors[o1], plans[n], ctx, &stats);
      seconds[n] = stats.wall_seconds;
      result.mode_nnz[n] = stats.nnz;

      const DenseMatrix v = hadamard(grams[o0], grams[o1]);
      auto [factor, norms] = normalize_columns(matmul(m, pinv_spd(v)));
      if (!all_finite(factor)) throw NumericError("cp_als: factor update produced non-finite values");
      model.factors[n] = std::move(factor);
      // the other factors are unit-norm or were absorbed by this solve, so
      // the fresh norms alone make the model exact
      model.lambda = std::move(norms);
      grams[n] = gram(model.factors[n]);

      if (cfg.track_half_steps) result.half_step_fits.push_back(compute_fit(t, model));
    }
    result.mode_seconds.push_back(seconds);

    const double fit = cfg.track_half_steps ? result.half_step_fits.back() : compute_fit(t, model);
    result.fit_trace.push_back(fit);
    result.iterations = it + 1;
    if (!std::isfinite(fit)) throw NumericError("cp_als: fit became non-finite");
    if (std::abs(fit - prev_fit) < cfg.tol) break;
    prev_fit = fit;
  }
  return result;
}

}  // namespace fcoo
