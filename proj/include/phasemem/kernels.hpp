// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file kernels.hpp
 * @brief Dense symmetric eigen-kernels.
 *
 * Two implementations of the same decomposition:
 * - kernels::tridiagonal_ql: Householder reduction with OpenMP row-parallel
 *   updates, implicit-shift QL whose plane rotations are recorded and applied
 *   in cache-sized column chunks. Every output element is produced by one
 *   thread in a fixed order, so results are bit-identical for any thread count.
 * - kernels::reference::tred2_tql2: the plain serial textbook form, kept as a
 *   cross-check for tests and as the benchmark baseline.
 *
 * Both return eigenvectors as rows (row k pairs with value k), unsorted.
 */

#pragma once

#include "phasemem/matrix.hpp"

#include <vector>

namespace phasemem::kernels {

enum class Exec { Serial, Parallel };

struct EigenPairs {
  std::vector<double> values;
  DenseMatrix vectors;  ///< row k is the unit eigenvector of values[k]
};

/// Householder reduction of a full symmetric matrix to tridiagonal form.
/// On return `diag`/`sub` hold T (sub[i] couples i-1 and i, sub[0] = 0) and
/// the result holds Q^T with A = Q T Q^T. `a` is overwritten.
DenseMatrix householder_tridiagonalize(DenseMatrix& a, std::vector<double>& diag,
                                       std::vector<double>& sub, Exec exec);

/// Implicit-shift QL on (diag, sub) in the layout produced above. Rotations
/// are applied to the rows of `zt`, which must start as Q^T. Throws
/// KernelError naming the eigenvalue index after `max_iterations` sweeps.
void implicit_ql(std::vector<double>& diag, std::vector<double>& sub, DenseMatrix& zt, Exec exec,
                 int max_iterations = 50);

/// Full decomposition through the two kernels above.
EigenPairs tridiagonal_ql(const DenseMatrix& a, Exec exec = Exec::Parallel, int max_iterations = 50);

namespace reference {

/// Serial textbook Householder (lower triangle) + QL with immediate rotation
/// accumulation.
EigenPairs tred2_tql2(const DenseMatrix& a, int max_iterations = 50);

}  // namespace reference

}  // namespace phasemem::kernels
