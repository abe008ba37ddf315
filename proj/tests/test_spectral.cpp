// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "phasemem/error.hpp"
#include "phasemem/kernels.hpp"
#include "phasemem/model.hpp"
#include "phasemem/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <random>

using namespace phasemem;

namespace {

DenseMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
  return a;
}

HamiltonianMatrix model(int n, double j, std::uint64_t r = 0) {
  ModelConfig c;
  c.n = n;
  c.j_bound = j;
  c.master_seed = 99;
  return build_hamiltonian(draw_couplings(c, r), c);
}

}  // namespace

TEST_CASE("2x2 closed form") {
  DenseMatrix a(2, 2);
  a(0, 0) = a(1, 1) = 0.7;
  a(0, 1) = a(1, 0) = 0.3;
  const auto s = diagonalize(a);
  CHECK(s.values[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(s.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s.component(0, 0)) == doctest::Approx(r));
  CHECK(s.component(0, 0) * s.component(1, 0) < 0);  // (1, -1)/sqrt 2
  CHECK(s.component(0, 1) == doctest::Approx(r));
  CHECK(s.component(1, 1) == doctest::Approx(r));
}

TEST_CASE("diagonal input gives sorted values and a permuted identity") {
  const std::vector<double> d{3.0, -1.0, 2.0, 0.5};
  DenseMatrix a(4, 4);
  for (std::size_t i = 0; i < 4; ++i) a(i, i) = d[i];
  for (auto split : {true, false}) {
    DiagonalizeOptions o;
    o.split_blocks = split;
    const auto s = diagonalize(a, o);
    CHECK(s.values == std::vector<double>{-1.0, 0.5, 2.0, 3.0});
    const std::size_t perm[] = {1, 3, 2, 0};
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < 4; ++i) CHECK(s.component(i, k) == (i == perm[k] ? 1.0 : 0.0));
  }
}

TEST_CASE("random symmetric 8x8 against the Jacobi oracle") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_symmetric(8, rng);
    const auto ref = oracle::jacobi(a);
    const auto s = diagonalize(a);
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(s.values[k] - ref.values[k]) <= 1e-9);
    const auto chk = check_spectrum(a, s);
    CHECK(chk.within(1e-12));
  }
}

TEST_CASE("serial, parallel and reference kernels agree") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 3u, 17u, 64u, 150u}) {
    const auto a = random_symmetric(n, rng);
    const auto par = kernels::tridiagonal_ql(a, kernels::Exec::Parallel);
    const auto ser = kernels::tridiagonal_ql(a, kernels::Exec::Serial);
    const auto ref = kernels::reference::tred2_tql2(a);
    // The parallel path only reorders independent work: results are bitwise equal.
    CHECK(par.values == ser.values);
    CHECK(par.vectors == ser.vectors);
    auto v1 = ser.values, v2 = ref.values;
    std::sort(v1.begin(), v1.end());
    std::sort(v2.begin(), v2.end());
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(v1[k] - v2[k]) <= 1e-12 * static_cast<double>(n));
  }
}

TEST_CASE("trace and Frobenius identities, shift invariance") {
  std::mt19937_64 rng(5);
  const auto a = random_symmetric(40, rng);
  const auto s = diagonalize(a);
  double tr = 0.0, sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < 40; ++i) tr += a(i, i);
  for (double v : s.values) {
    sum += v;
    sq += v * v;
  }
  const double fro = frobenius_norm(a);
  CHECK(std::abs(sum - tr) <= 1e-9 * fro);
  CHECK(std::abs(sq - fro * fro) <= 1e-9 * fro * fro);

  const double eps = 0.125;
  auto b = a;
  for (std::size_t i = 0; i < 40; ++i) b(i, i) += eps;
  const auto t = diagonalize(b);
  for (std::size_t k = 0; k < 40; ++k) {
    CHECK(std::abs(t.values[k] - s.values[k] - eps) <= 1e-10 * fro);
    double dot = 0.0;
    for (std::size_t i = 0; i < 40; ++i) dot += s.component(i, k) * t.component(i, k);
    CHECK(std::abs(std::abs(dot) - 1.0) <= 1e-9);
  }
}

TEST_CASE("degenerate spectrum still yields an orthonormal basis") {
  // Identity plus a rank-one update: eigenvalue 1 with multiplicity n - 1.
  const std::size_t n = 12;
  DenseMatrix a = DenseMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) += 0.5;
  const auto s = diagonalize(a);
  CHECK(check_spectrum(a, s).within(1e-12));
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(s.values[k] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.values.back() == doctest::Approx(1.0 + 0.5 * n).epsilon(1e-12));
}

TEST_CASE("model Hamiltonians meet the accuracy contract") {
  for (int n : {2, 4, 6, 8, 10})
    for (double j : {0.0, 0.02, 0.48}) {
      const auto h = model(n, j);
      DiagonalizeOptions o;
      o.verify = true;
      const auto s = diagonalize(h, o);
      const auto chk = check_spectrum(h.matrix, s);
      CHECK(chk.orthonormality <= 1e-10);
      CHECK(chk.residual <= 1e-10);
      CHECK(chk.sorted);
    }
}

TEST_CASE("block splitting does not change the spectrum") {
  const auto h = model(7, 0.3);
  CHECK(connected_blocks(h.matrix).size() == 2);  // bit parity sectors
  DiagonalizeOptions whole;
  whole.split_blocks = false;
  const auto a = diagonalize(h), b = diagonalize(h, whole);
  for (std::size_t k = 0; k < a.dim(); ++k) CHECK(std::abs(a.values[k] - b.values[k]) <= 1e-12);
  CHECK(std::all_of(b.sector.begin(), b.sector.end(), [](std::size_t x) { return x == 0; }));
}

TEST_CASE("sector labels follow bit parity") {
  const auto s = diagonalize(model(6, 0.3));
  REQUIRE(s.sector.size() == s.dim());
  std::size_t even = 0;
  for (std::size_t k = 0; k < s.dim(); ++k) {
    CHECK(s.sector[k] <= 1);
    for (std::size_t i = 0; i < s.dim(); ++i) {
      // block 0 holds register state 0, which has even parity
      const bool odd = std::popcount(i) % 2 == 1;
      if (odd != (s.sector[k] == 1)) CHECK(s.component(i, k) == 0.0);
    }
    even += s.sector[k] == 0;
  }
  CHECK(even == s.dim() / 2);
}

TEST_CASE("largest component of every eigenvector is positive") {
  const auto s = diagonalize(model(6, 0.48));
  for (std::size_t k = 0; k < s.dim(); ++k) {
    const auto v = s.eigenvector(k);
    std::size_t best = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[best])) best = i;
    CHECK(v[best] > 0.0);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const auto h = model(9, 0.48);
  DiagonalizeOptions ser;
  ser.exec = kernels::Exec::Serial;
  const auto a = diagonalize(h, ser), b = diagonalize(h);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("asymmetric input is rejected with the asymmetry reported") {
  DenseMatrix a(3, 3);
  a(0, 1) = 1.0;
  a(1, 0) = 0.5;
  try {
    diagonalize(a);
    FAIL("no exception");
  } catch (const KernelError& e) {
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
  CHECK_THROWS_AS(diagonalize(DenseMatrix(2, 3)), KernelError);
}

TEST_CASE("non-convergence names the eigenvalue index") {
  std::mt19937_64 rng(1);
  const auto a = random_symmetric(30, rng);
  DiagonalizeOptions o;
  o.max_sweeps = 0;
  try {
    diagonalize(a, o);
    FAIL("no exception");
  } catch (const KernelError& e) {
    CHECK(std::string(e.what()).find("eigenvalue index") != std::string::npos);
  }
}

TEST_CASE("spectrum dump round trip") {
  const auto s = diagonalize(model(5, 0.2));
  ConfigHash hash{};
  for (std::size_t i = 0; i < hash.size(); ++i) hash[i] = static_cast<std::uint8_t>(i * 7);
  const auto path = std::filesystem::temp_directory_path() / "phasemem_spec_roundtrip.bin";
  write_spectrum(path, s, hash);
  CHECK(std::filesystem::file_size(path) == 8 + 32 + 8 + 32 * 8 + 32 * 32 * 8);
  const auto f = read_spectrum(path);
  CHECK(f.hash == hash);
  CHECK(f.spectrum.values == s.values);
  CHECK(f.spectrum.vectors == s.vectors);
  std::filesystem::remove(path);
}
