// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file model.hpp
 * @brief Two-body random qubit Hamiltonian: ensemble description, disorder
 *        draws, dense matrix construction and the non-interacting register
 *        basis.
 *
 * Conventions:
 * - Qubit k (0-based) is bit (n-1-k) of the register index, so the matrix is
 *   the usual Kronecker ordering with qubit 0 as the leftmost factor.
 * - sigma^z |0> = +|0>, i.e. a cleared bit contributes +L_k.
 * - Each realization owns an independent random stream derived from
 *   (master_seed, realization_index) only, so ensembles are order-free.
 */

#pragma once

#include "phasemem/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

namespace phasemem {

enum class Topology { Chain, AllPairs };
enum class CouplingOp { TransverseXX, DiagonalZZ };

std::string_view to_string(Topology t) noexcept;
std::string_view to_string(CouplingOp c) noexcept;
Topology parse_topology(std::string_view s);      // throws ValidationError
CouplingOp parse_coupling_op(std::string_view s);  // throws ValidationError

struct ModelConfig {
  int n = 4;                 ///< qubit count
  double delta0 = 1.0;       ///< mean one-qubit splitting
  double delta = 0.2;        ///< splitting spread, L_i in [delta0 - delta/2, delta0 + delta/2]
  double j_bound = 0.0;      ///< coupling bound, J_ij in [-J, J]
  Topology topology = Topology::Chain;
  CouplingOp coupling_op = CouplingOp::TransverseXX;
  std::uint64_t master_seed = 1;
  int max_qubits = 14;       ///< dimension guard for dense construction

  /// Empty when valid; otherwise one message per violated invariant.
  [[nodiscard]] std::vector<std::string> validate() const;
  [[nodiscard]] std::size_t dimension() const noexcept { return std::size_t{1} << n; }
};

using QubitPair = std::pair<int, int>;

struct CouplingDraw {
  std::vector<double> splittings;          ///< L_k, k = 0..n-1
  std::map<QubitPair, double> couplings;   ///< J_ij for coupled pairs, i < j
  std::uint64_t realization_index = 0;
};

struct HamiltonianMatrix {
  DenseMatrix matrix;   ///< N x N, symmetric
  int n = 0;
  [[nodiscard]] std::size_t dim() const noexcept { return matrix.rows(); }
};

struct RegisterBasis {
  int n = 0;
  std::vector<double> energies;        ///< E_i indexed by register state
  std::vector<std::size_t> by_energy;  ///< register indices sorted by E_i (stable)
  [[nodiscard]] std::size_t dim() const noexcept { return energies.size(); }
};

/// Pairs coupled under a topology, lexicographic order.
std::vector<QubitPair> coupled_pairs(int n, Topology topology);

/// 64-bit sub-seed for one realization; a pure function of its inputs.
std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t realization_index) noexcept;

/// Uniform draws: L_k first (k ascending), then one unit draw per coupled pair
/// in lexicographic order, scaled by j_bound.
CouplingDraw draw_couplings(const ModelConfig& config, std::uint64_t realization_index);

/// Dense Hamiltonian. Throws ValidationError if n exceeds config.max_qubits or
/// the draw does not match the config.
HamiltonianMatrix build_hamiltonian(const CouplingDraw& draw, const ModelConfig& config);

/// Register energies: L-terms only, plus zz terms when coupling_op = DiagonalZZ.
RegisterBasis register_basis(const CouplingDraw& draw, int n,
                             CouplingOp coupling_op = CouplingOp::TransverseXX);

/// sigma^z eigenvalue (+1/-1) of qubit k in register state `state`.
inline int spin_sign(std::size_t state, int qubit, int n) noexcept {
  return ((state >> (n - 1 - qubit)) & 1U) ? -1 : 1;
}

/// Bit mask of qubit k inside a register index.
inline std::size_t qubit_mask(int qubit, int n) noexcept {
  return std::size_t{1} << (n - 1 - qubit);
}

}  // namespace phasemem
