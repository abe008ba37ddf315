// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/model.hpp"

#include "phasemem/error.hpp"
#include "phasemem/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace phasemem {

std::string_view to_string(Topology t) noexcept {
  return t == Topology::Chain ? "chain" : "all-pairs";
}

std::string_view to_string(CouplingOp c) noexcept {
  return c == CouplingOp::TransverseXX ? "transverse-xx" : "diagonal-zz";
}

Topology parse_topology(std::string_view s) {
  if (s == "chain" || s == "nearest-neighbor") return Topology::Chain;
  if (s == "all-pairs") return Topology::AllPairs;
  throw ValidationError("unknown topology '" + std::string(s) + "' (expected chain|all-pairs)");
}

CouplingOp parse_coupling_op(std::string_view s) {
  if (s == "transverse-xx") return CouplingOp::TransverseXX;
  if (s == "diagonal-zz") return CouplingOp::DiagonalZZ;
  throw ValidationError("unknown coupling operator '" + std::string(s) +
                        "' (expected transverse-xx|diagonal-zz)");
}

std::vector<std::string> ModelConfig::validate() const {
  std::vector<std::string> errs;
  if (n < 1) errs.emplace_back("model.n: must be >= 1 (got " + std::to_string(n) + ")");
  if (n > max_qubits)
    errs.emplace_back("model.n: " + std::to_string(n) + " exceeds max_qubits = " + std::to_string(max_qubits));
  if (max_qubits > 30) errs.emplace_back("model.max_qubits: dense construction is limited to 30");
  if (!(delta >= 0.0)) errs.emplace_back("model.delta: must be >= 0");
  if (!(j_bound >= 0.0)) errs.emplace_back("model.j_bound: must be >= 0");
  if (!(delta / 2 < delta0)) errs.emplace_back("model.delta: delta/2 must be < delta0 so every splitting is positive");
  return errs;
}

std::vector<QubitPair> coupled_pairs(int n, Topology topology) {
  std::vector<QubitPair> pairs;
  if (topology == Topology::Chain) {
    for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t realization_index) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(realization_index + 0x632be59bd9b4e019ULL));
}

CouplingDraw draw_couplings(const ModelConfig& config, std::uint64_t realization_index) {
  std::mt19937_64 rng(realization_seed(config.master_seed, realization_index));
  CouplingDraw draw;
  draw.realization_index = realization_index;
  draw.splittings.reserve(static_cast<std::size_t>(std::max(config.n, 0)));
  const double lo = config.delta0 - config.delta / 2;
  for (int k = 0; k < config.n; ++k) draw.splittings.push_back(lo + config.delta * unit_uniform(rng));
  for (const auto& pair : coupled_pairs(config.n, config.topology)) {
    const double u = 2.0 * unit_uniform(rng) - 1.0;
    draw.couplings.emplace(pair, config.j_bound * u);
  }
  return draw;
}

HamiltonianMatrix build_hamiltonian(const CouplingDraw& draw, const ModelConfig& config) {
  const int n = config.n;
  if (n > config.max_qubits)
    throw ValidationError("dimension overflow: n = " + std::to_string(n) + " exceeds max_qubits = " +
                          std::to_string(config.max_qubits));
  if (static_cast<int>(draw.splittings.size()) != n)
    throw ValidationError("coupling draw has " + std::to_string(draw.splittings.size()) +
                          " splittings, config expects " + std::to_string(n));

  const std::size_t dim = std::size_t{1} << n;
  HamiltonianMatrix h{DenseMatrix(dim, dim), n};

  struct Term {
    std::size_t flip;  // xx: both bits; zz: unused
    int qi, qj;
    double value;
  };
  std::vector<Term> terms;
  for (const auto& [pair, value] : draw.couplings) {
    if (pair.first < 0 || pair.second >= n || pair.first >= pair.second)
      throw ValidationError("coupling draw contains an invalid pair");
    terms.push_back({qubit_mask(pair.first, n) | qubit_mask(pair.second, n), pair.first, pair.second, value});
  }
  const bool transverse = config.coupling_op == CouplingOp::TransverseXX;
  const auto& L = draw.splittings;
  auto& m = h.matrix;

  // Every row is written by exactly one thread.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t sa = 0; sa < static_cast<std::ptrdiff_t>(dim); ++sa) {
    const auto a = static_cast<std::size_t>(sa);
    double diag = 0.0;
    for (int k = 0; k < n; ++k) diag += spin_sign(a, k, n) * L[static_cast<std::size_t>(k)];
    for (const auto& t : terms) {
      if (transverse)
        m(a, a ^ t.flip) += t.value;
      else
        diag += t.value * spin_sign(a, t.qi, n) * spin_sign(a, t.qj, n);
    }
    m(a, a) += diag;
  }
  return h;
}

RegisterBasis register_basis(const CouplingDraw& draw, int n, CouplingOp coupling_op) {
  RegisterBasis basis;
  basis.n = n;
  const std::size_t dim = std::size_t{1} << n;
  basis.energies.assign(dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a) {
    double e = 0.0;
    for (int k = 0; k < n; ++k) e += spin_sign(a, k, n) * draw.splittings[static_cast<std::size_t>(k)];
    if (coupling_op == CouplingOp::DiagonalZZ)
      for (const auto& [pair, value] : draw.couplings)
        e += value * spin_sign(a, pair.first, n) * spin_sign(a, pair.second, n);
    basis.energies[a] = e;
  }
  basis.by_energy.resize(dim);
  std::iota(basis.by_energy.begin(), basis.by_energy.end(), std::size_t{0});
  std::stable_sort(basis.by_energy.begin(), basis.by_energy.end(),
                   [&](std::size_t x, std::size_t y) { return basis.energies[x] < basis.energies[y]; });
  return basis;
}

}  // namespace phasemem
