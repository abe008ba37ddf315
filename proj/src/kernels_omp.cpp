// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/error.hpp"
#include "phasemem/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <omp.h>

namespace phasemem::kernels {

namespace {

using idx = std::ptrdiff_t;

// Columns of Z^T handled per task while replaying QL rotations: as wide as
// possible (per-rotation overhead dominates) while leaving one chunk per thread.
std::size_t rotation_chunk(std::size_t ncols, bool parallel) {
  std::size_t threads = parallel ? static_cast<std::size_t>(omp_get_max_threads()) : 1;
  std::size_t w = (ncols + threads - 1) / threads;
  w = std::clamp<std::size_t>(w, 64, 1024);
  return (w + 7) / 8 * 8;
}
// Replay recorded rotations once this many are pending.
constexpr std::size_t kRotationBatch = std::size_t{1} << 22;

inline double dot(const double* __restrict x, const double* __restrict y, std::size_t n) noexcept {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
  return s;
}

struct Sweep {
  std::size_t lo;      // rotations act on rows (i, i+1) for i = hi..lo
  std::size_t hi;
  std::size_t offset;  // into the cos/sin arrays
};

class RotationLog {
 public:
  explicit RotationLog(DenseMatrix& zt, bool parallel) : zt_(zt), parallel_(parallel) {}

  void begin_sweep(std::size_t lo, std::size_t hi) { sweeps_.push_back({lo, hi, cos_.size()}); }
  void push(double c, double s) {
    cos_.push_back(c);
    sin_.push_back(s);
  }
  void maybe_flush() {
    if (cos_.size() >= kRotationBatch) flush();
  }

  void flush() {
    if (sweeps_.empty()) return;
    const std::size_t ncols = zt_.cols();
    const std::size_t width = rotation_chunk(ncols, parallel_);
    const idx nchunks = static_cast<idx>((ncols + width - 1) / width);
#pragma omp parallel for schedule(static) if (parallel_)
    for (idx chunk = 0; chunk < nchunks; ++chunk) {
      const std::size_t c0 = static_cast<std::size_t>(chunk) * width;
      const std::size_t w = std::min(width, ncols - c0);
      std::vector<double> carry(w);
      for (const auto& sw : sweeps_) {
        // The row written by rotation i is read again by rotation i-1, so
        // keep it in `carry` and touch each stored row once.
        std::size_t r = sw.offset;
        const double* top = zt_.data() + (sw.hi + 1) * ncols + c0;
        for (std::size_t k = 0; k < w; ++k) carry[k] = top[k];
        for (std::size_t i = sw.hi + 1; i-- > sw.lo; ++r) {
          const double c = cos_[r];
          const double s = sin_[r];
          double* __restrict zi = zt_.data() + i * ncols + c0;
          double* __restrict zj = zi + ncols;
#pragma omp simd
          for (std::size_t k = 0; k < w; ++k) {
            const double x = zi[k];
            const double y = carry[k];
            zj[k] = s * x + c * y;
            carry[k] = c * x - s * y;
          }
        }
        double* bottom = zt_.data() + sw.lo * ncols + c0;
        for (std::size_t k = 0; k < w; ++k) bottom[k] = carry[k];
      }
    }
    sweeps_.clear();
    cos_.clear();
    sin_.clear();
  }

 private:
  DenseMatrix& zt_;
  bool parallel_;
  std::vector<Sweep> sweeps_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace

DenseMatrix householder_tridiagonalize(DenseMatrix& a, std::vector<double>& diag, std::vector<double>& sub,
                                       Exec exec) {
  const std::size_t n = a.rows();
  const bool par = exec == Exec::Parallel;
  diag.assign(n, 0.0);
  sub.assign(n, 0.0);
  std::vector<double> h(n, 0.0);
  std::vector<double> p(n, 0.0);
  std::vector<double> p_next(n, 0.0);

  // Row i is reduced against the leading i x i block, which is kept fully
  // symmetric so every update is a contiguous row operation. The reflector
  // u_i overwrites a(i, 0..i-1).
  auto form_reflector = [&](std::size_t i) {
    double* u = a.data() + i * n;
    double scale = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(u[k]);
    diag[i] = a(i, i);
    if (i == 1 || scale == 0.0) {
      sub[i] = u[i - 1];
      h[i] = 0.0;
      return false;
    }
    double sigma = 0.0;
    for (std::size_t k = 0; k < i; ++k) {
      u[k] /= scale;
      sigma += u[k] * u[k];
    }
    const double f = u[i - 1];
    const double g = f >= 0.0 ? -std::sqrt(sigma) : std::sqrt(sigma);
    sub[i] = scale * g;
    h[i] = sigma - f * g;
    u[i - 1] = f - g;
    return true;
  };
  // p = B u / h  ->  q = p - (u.p / 2h) u
  auto finish_q = [&](std::size_t i, std::vector<double>& q) {
    const double* u = a.data() + i * n;
    const double kk = dot(u, q.data(), i) / (2.0 * h[i]);
    for (std::size_t k = 0; k < i; ++k) q[k] -= kk * u[k];
  };

  if (n >= 2) {
    std::size_t i = n - 1;
    bool active = form_reflector(i);
    if (active) {
      const double* u = a.data() + i * n;
#pragma omp parallel for schedule(static) if (par)
      for (idx j = 0; j < static_cast<idx>(i); ++j) p[j] = dot(a.data() + j * n, u, i) / h[i];
      finish_q(i, p);
    }
    // B <- B - u q^T - q u^T for reflector i, fused with B' u' for reflector
    // i-1. Column i-1 of rows j < i-1 is left stale: it is outside B'.
    for (; i >= 1; --i) {
      const std::size_t next = i - 1;
      const double* u = a.data() + i * n;
      if (active) {
        double* row = a.data() + next * n;
        for (std::size_t k = 0; k < i; ++k) row[k] -= u[next] * p[k] + p[next] * u[k];
      }
      if (next == 0) break;
      const bool next_active = form_reflector(next);
      const double* un = a.data() + next * n;
      const double hn = h[next];
#pragma omp parallel for schedule(static) if (par)
      for (idx sj = 0; sj < static_cast<idx>(next); ++sj) {
        const auto j = static_cast<std::size_t>(sj);
        double* __restrict row = a.data() + j * n;
        if (active) {
          const double uj = u[j];
          const double pj = p[j];
#pragma omp simd
          for (std::size_t k = 0; k < next; ++k) row[k] -= uj * p[k] + pj * u[k];
        }
        if (next_active) p_next[j] = dot(row, un, next) / hn;
      }
      if (next_active) finish_q(next, p_next);
      std::swap(p, p_next);
      active = next_active;
    }
  }
  if (n > 0) diag[0] = a(0, 0);

  // Q^T = P_1 P_2 ... P_{n-1}; P_i only touches the leading i x i block.
  DenseMatrix qt = DenseMatrix::identity(n);
  for (std::size_t i = 1; i < n; ++i) {
    if (h[i] == 0.0) continue;
    const double* u = a.data() + i * n;
    const double hh = h[i];
#pragma omp parallel for schedule(static) if (par)
    for (idx r = 0; r < static_cast<idx>(i); ++r) {
      double* __restrict row = qt.data() + r * n;
      const double y = dot(row, u, i) / hh;
#pragma omp simd
      for (std::size_t c = 0; c < i; ++c) row[c] -= y * u[c];
    }
  }
  return qt;
}

void implicit_ql(std::vector<double>& d, std::vector<double>& e, DenseMatrix& zt, Exec exec, int max_iterations) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  RotationLog log(zt, exec == Exec::Parallel);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double shift_total = 0.0;
  double tst1 = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iterations) {
          log.flush();
          throw KernelError("implicit QL did not converge for eigenvalue index " + std::to_string(l) +
                            " after " + std::to_string(max_iterations) + " sweeps");
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double hshift = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= hshift;
        shift_total += hshift;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        log.begin_sweep(l, m - 1);
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          hshift = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = hshift + s * (c * g + s * d[i]);
          log.push(c, s);
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
        log.maybe_flush();
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += shift_total;
    e[l] = 0.0;
  }
  log.flush();
}

EigenPairs tridiagonal_ql(const DenseMatrix& a, Exec exec, int max_iterations) {
  DenseMatrix work = a;
  std::vector<double> d, e;
  DenseMatrix zt = householder_tridiagonalize(work, d, e, exec);
  implicit_ql(d, e, zt, exec, max_iterations);
  return {std::move(d), std::move(zt)};
}

}  // namespace phasemem::kernels
