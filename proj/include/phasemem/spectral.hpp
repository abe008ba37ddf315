// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "phasemem/kernels.hpp"
#include "phasemem/matrix.hpp"
#include "phasemem/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace phasemem {

/// Eigen-decomposition of one real symmetric matrix.
///
/// Eigenvector k is stored contiguously (row k of `vectors`), which is the
/// column-major layout of the usual V with H V = V diag(values).
struct Spectrum {
  std::vector<double> values;  ///< ascending
  DenseMatrix vectors;         ///< row k: unit eigenvector of values[k]
  /// Connected block of H holding eigenpair k (blocks ordered by smallest
  /// member).  Empty when unknown, e.g. after read_spectrum.
  std::vector<std::size_t> sector;

  [[nodiscard]] std::size_t dim() const noexcept { return values.size(); }
  [[nodiscard]] std::span<const double> eigenvector(std::size_t k) const { return vectors.row(k); }
  /// <register i | eigenstate k>
  [[nodiscard]] double component(std::size_t i, std::size_t k) const { return vectors(k, i); }
};

struct DiagonalizeOptions {
  double tol = 1e-10;            ///< accuracy contract checked when `verify` is set
  double symmetry_tol = 1e-12;   ///< max |a_ij - a_ji| relative to ||H||_F
  int max_sweeps = 50;           ///< QL iterations allowed per eigenvalue
  kernels::Exec exec = kernels::Exec::Parallel;
  bool split_blocks = true;      ///< diagonalize connected components separately
  bool verify = false;           ///< run check_spectrum and throw on violation
};

/// Throws KernelError on asymmetric input or QL non-convergence, and (with
/// `verify`) when the residual/orthonormality contract is violated.
Spectrum diagonalize(const DenseMatrix& h, const DiagonalizeOptions& options = {});
Spectrum diagonalize(const HamiltonianMatrix& h, const DiagonalizeOptions& options = {});

/// Index sets of the connected components of the nonzero pattern of `a`,
/// each sorted, ordered by smallest member.
std::vector<std::vector<std::size_t>> connected_blocks(const DenseMatrix& a);

struct SpectrumCheck {
  double orthonormality = 0.0;  ///< max |V^T V - I|
  double residual = 0.0;        ///< max_k ||H v_k - lambda_k v_k||_2 / ||H||_F (0 if H = 0)
  bool sorted = true;
  [[nodiscard]] bool within(double tol) const noexcept { return sorted && orthonormality <= tol && residual <= tol; }
};

SpectrumCheck check_spectrum(const DenseMatrix& h, const Spectrum& spectrum);

using ConfigHash = std::array<std::uint8_t, 32>;

/// Binary cache layout, all little-endian:
///   8 bytes magic "PMSPEC01", 32 bytes config hash, u64 N,
///   N f64 eigenvalues, N*N f64 eigenvectors column-major.
void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum, const ConfigHash& hash);

struct SpectrumFile {
  ConfigHash hash{};
  Spectrum spectrum;
};
SpectrumFile read_spectrum(const std::filesystem::path& path);

}  // namespace phasemem
