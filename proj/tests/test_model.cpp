// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "phasemem/error.hpp"
#include "phasemem/model.hpp"

#include <cmath>

using namespace phasemem;

namespace {

ModelConfig config(int n, double j, Topology t = Topology::Chain, CouplingOp op = CouplingOp::TransverseXX) {
  ModelConfig c;
  c.n = n;
  c.j_bound = j;
  c.topology = t;
  c.coupling_op = op;
  c.master_seed = 2024;
  return c;
}

}  // namespace

TEST_CASE("single qubit has no pairs and one splitting in range") {
  auto c = config(1, 0.3);
  c.delta = 0.4;
  const auto d = draw_couplings(c, 0);
  CHECK(d.couplings.empty());
  REQUIRE(d.splittings.size() == 1);
  CHECK(d.splittings[0] >= c.delta0 - c.delta / 2);
  CHECK(d.splittings[0] <= c.delta0 + c.delta / 2);
}

TEST_CASE("chain topology couples neighbours only") {
  const auto d = draw_couplings(config(3, 0.1), 5);
  REQUIRE(d.couplings.size() == 2);
  CHECK(d.couplings.count({0, 1}) == 1);
  CHECK(d.couplings.count({1, 2}) == 1);
}

TEST_CASE("zero spread pins every splitting") {
  auto c = config(4, 0.2, Topology::AllPairs);
  c.delta = 0.0;
  const auto d = draw_couplings(c, 3);
  for (double L : d.splittings) CHECK(L == c.delta0);
  CHECK(d.couplings.size() == 6);
}

TEST_CASE("draws stay inside their intervals") {
  auto c = config(8, 0.37, Topology::AllPairs);
  c.delta = 0.5;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto d = draw_couplings(c, r);
    for (double L : d.splittings) {
      CHECK(L >= c.delta0 - c.delta / 2);
      CHECK(L <= c.delta0 + c.delta / 2);
    }
    for (const auto& [pair, J] : d.couplings) CHECK(std::abs(J) <= c.j_bound);
  }
}

TEST_CASE("draws are deterministic and differ between realizations") {
  const auto c = config(6, 0.2);
  const auto a = draw_couplings(c, 7), b = draw_couplings(c, 7), other = draw_couplings(c, 8);
  CHECK(a.splittings == b.splittings);
  CHECK(a.couplings == b.couplings);
  CHECK(a.splittings != other.splittings);
  CHECK(build_hamiltonian(a, c).matrix == build_hamiltonian(b, c).matrix);
}

TEST_CASE("one qubit Hamiltonian is diag(L, -L)") {
  const auto c = config(1, 0.0);
  CouplingDraw d;
  d.splittings = {1.0};
  const auto h = build_hamiltonian(d, c);
  CHECK(h.matrix(0, 0) == 1.0);
  CHECK(h.matrix(1, 1) == -1.0);
  CHECK(h.matrix(0, 1) == 0.0);
}

TEST_CASE("two qubit transverse Hamiltonian equals the Kronecker sum") {
  const auto c = config(2, 0.1);
  CouplingDraw d;
  d.splittings = {1.0, 0.5};
  d.couplings[{0, 1}] = 0.1;
  const auto h = build_hamiltonian(d, c);
  const auto ref = oracle::kron_hamiltonian(d.splittings, d.couplings, true);
  CHECK(h.matrix == ref);
}

TEST_CASE("random draws match the Kronecker oracle element by element") {
  for (auto op : {CouplingOp::TransverseXX, CouplingOp::DiagonalZZ})
    for (auto top : {Topology::Chain, Topology::AllPairs}) {
      const auto c = config(5, 0.4, top, op);
      const auto d = draw_couplings(c, 11);
      const auto h = build_hamiltonian(d, c);
      const auto ref = oracle::kron_hamiltonian(d.splittings, d.couplings, op == CouplingOp::TransverseXX);
      double worst = 0.0;
      for (std::size_t i = 0; i < ref.rows(); ++i)
        for (std::size_t j = 0; j < ref.cols(); ++j) worst = std::max(worst, std::abs(h.matrix(i, j) - ref(i, j)));
      CHECK(worst <= 1e-15);
    }
}

TEST_CASE("transverse off-diagonals connect states differing in one coupled pair") {
  const auto c = config(6, 0.3, Topology::AllPairs);
  const auto d = draw_couplings(c, 2);
  const auto h = build_hamiltonian(d, c);
  for (std::size_t a = 0; a < h.dim(); ++a)
    for (std::size_t b = 0; b < h.dim(); ++b) {
      if (a == b || h.matrix(a, b) == 0.0) continue;
      const std::size_t diff = a ^ b;
      bool found = false;
      for (const auto& [pair, J] : d.couplings)
        if (diff == (qubit_mask(pair.first, c.n) | qubit_mask(pair.second, c.n))) found = true;
      CHECK(found);
    }
}

TEST_CASE("diagonal-zz control is exactly diagonal") {
  const auto c = config(6, 0.5, Topology::AllPairs, CouplingOp::DiagonalZZ);
  const auto h = build_hamiltonian(draw_couplings(c, 0), c);
  double off = 0.0;
  for (std::size_t i = 0; i < h.dim(); ++i)
    for (std::size_t j = 0; j < h.dim(); ++j)
      if (i != j) off = std::max(off, std::abs(h.matrix(i, j)));
  CHECK(off == 0.0);
}

TEST_CASE("transverse Hamiltonian is symmetric and traceless") {
  const auto c = config(8, 0.48);
  const auto h = build_hamiltonian(draw_couplings(c, 4), c);
  double trace = 0.0;
  for (std::size_t i = 0; i < h.dim(); ++i) trace += h.matrix(i, i);
  CHECK(std::abs(trace) <= 1e-12 * static_cast<double>(h.dim()) * c.delta0);
  CHECK(max_asymmetry(h.matrix) <= 1e-14 * frobenius_norm(h.matrix));
}

TEST_CASE("eigenvalue bound grows linearly while the dimension doubles") {
  // Gershgorin row sums bound the spectrum by sum|L| + sum|J|.
  for (int n = 2; n <= 9; ++n) {
    const auto c = config(n, 0.48, Topology::AllPairs);
    const auto d = draw_couplings(c, 1);
    const auto h = build_hamiltonian(d, c);
    double bound = 0.0;
    for (double L : d.splittings) bound += std::abs(L);
    for (const auto& [p, J] : d.couplings) bound += std::abs(J);
    double worst = 0.0;
    for (std::size_t i = 0; i < h.dim(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < h.dim(); ++j) row += std::abs(h.matrix(i, j));
      worst = std::max(worst, row);
    }
    CHECK(worst <= bound + 1e-12);
    CHECK(h.dim() == std::size_t{1} << n);
  }
}

TEST_CASE("register basis energies") {
  CouplingDraw d;
  d.splittings = {1.0};
  CHECK(register_basis(d, 1).energies == std::vector<double>{1.0, -1.0});
  d.splittings = {1.0, 0.5};
  CHECK(register_basis(d, 2).energies == std::vector<double>{1.5, 0.5, -0.5, -1.5});

  const auto c = config(4, 0.2);
  const auto draw = draw_couplings(c, 9);
  const auto basis = register_basis(draw, 4);
  const auto ref = oracle::sign_pattern_energies(draw.splittings);
  REQUIRE(basis.energies.size() == ref.size());
  for (std::size_t a = 0; a < ref.size(); ++a) CHECK(basis.energies[a] == doctest::Approx(ref[a]).epsilon(1e-15));
  for (std::size_t k = 1; k < basis.by_energy.size(); ++k)
    CHECK(basis.energies[basis.by_energy[k - 1]] <= basis.energies[basis.by_energy[k]]);
}

TEST_CASE("register basis equals the transverse diagonal and the zz diagonal") {
  for (auto op : {CouplingOp::TransverseXX, CouplingOp::DiagonalZZ}) {
    const auto c = config(6, 0.3, Topology::AllPairs, op);
    const auto d = draw_couplings(c, 3);
    const auto h = build_hamiltonian(d, c);
    const auto b = register_basis(d, c.n, op);
    for (std::size_t a = 0; a < h.dim(); ++a) CHECK(b.energies[a] == doctest::Approx(h.matrix(a, a)).epsilon(1e-14));
  }
}

TEST_CASE("dimension guard and config validation") {
  auto c = config(15, 0.1);
  const auto d = draw_couplings(c, 0);
  CHECK_THROWS_AS(build_hamiltonian(d, c), ValidationError);
  c.n = 0;
  CHECK_FALSE(c.validate().empty());
  c.n = 4;
  c.delta = 2.5;
  CHECK_FALSE(c.validate().empty());
  c.delta = 0.2;
  c.j_bound = -1;
  CHECK_FALSE(c.validate().empty());
  c.j_bound = 0.1;
  CHECK(c.validate().empty());
}

TEST_CASE("enum spellings") {
  CHECK(parse_topology("nearest-neighbor") == Topology::Chain);
  CHECK(parse_topology("all-pairs") == Topology::AllPairs);
  CHECK(parse_coupling_op("diagonal-zz") == CouplingOp::DiagonalZZ);
  CHECK_THROWS_AS(parse_topology("ring"), ValidationError);
}

TEST_CASE("n = 12 at J/Delta0 = 0.02 is diagonally dominant") {
  const auto c = config(12, 0.02);
  const auto d = draw_couplings(c, 0);
  const auto h = build_hamiltonian(d, c);
  CHECK(h.dim() == 4096);
  CHECK(max_asymmetry(h.matrix) == 0.0);
  double off = 0.0;
  for (std::size_t i = 0; i < h.dim(); ++i)
    for (std::size_t j = 0; j < h.dim(); ++j)
      if (i != j) off = std::max(off, std::abs(h.matrix(i, j)));
  // Smallest single-qubit flip gap 2 min L_k sets the unperturbed level scale.
  const double gap = 2.0 * *std::min_element(d.splittings.begin(), d.splittings.end());
  CHECK(off / gap < 0.02);
}
