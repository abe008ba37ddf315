// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/spectral.hpp"

#include "phasemem/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace phasemem {

double max_asymmetry(const DenseMatrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.storage()) s += v * v;
  return std::sqrt(s);
}

namespace {

void fix_sign(std::span<double> v) {
  std::size_t best = 0;
  double mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > mag) {
      mag = std::abs(v[i]);
      best = i;
    }
  }
  if (!v.empty() && v[best] < 0)
    for (double& x : v) x = -x;
}

}  // namespace

std::vector<std::vector<std::size_t>> connected_blocks(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (a(i, j) != 0.0 || a(j, i) != 0.0) {
        const std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] == n) {
      slot[r] = blocks.size();
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

Spectrum diagonalize(const DenseMatrix& h, const DiagonalizeOptions& options) {
  if (!h.square()) throw KernelError("diagonalize: matrix is not square");
  const std::size_t n = h.rows();
  if (n == 0) throw KernelError("diagonalize: empty matrix");
  const double norm = frobenius_norm(h);
  const double asym = max_asymmetry(h);
  if (asym > options.symmetry_tol * std::max(norm, 1e-300) && asym > 0.0) {
    std::ostringstream msg;
    msg << "diagonalize: matrix is not symmetric (max |a_ij - a_ji| = " << asym << ", ||H||_F = " << norm << ")";
    throw KernelError(msg.str());
  }

  std::vector<std::vector<std::size_t>> blocks;
  if (options.split_blocks) {
    blocks = connected_blocks(h);
  } else {
    blocks.emplace_back(n);
    std::iota(blocks.front().begin(), blocks.front().end(), std::size_t{0});
  }

  // (value, block, local index) for every eigenpair, then one stable sort.
  struct Entry {
    double value;
    std::size_t block;
    std::size_t local;
  };
  std::vector<Entry> entries;
  entries.reserve(n);
  std::vector<kernels::EigenPairs> parts(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& idx = blocks[b];
    const std::size_t m = idx.size();
    if (m == 1) {
      parts[b].values = {h(idx[0], idx[0])};
      parts[b].vectors = DenseMatrix(1, 1, 1.0);
    } else {
      DenseMatrix sub(m, m);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) sub(r, c) = h(idx[r], idx[c]);
      parts[b] = kernels::tridiagonal_ql(sub, options.exec, options.max_sweeps);
    }
    for (std::size_t k = 0; k < m; ++k) entries.push_back({parts[b].values[k], b, k});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.block != y.block) return x.block < y.block;
    return x.local < y.local;
  });

  Spectrum out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  out.sector.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Entry& en = entries[k];
    out.values[k] = en.value;
    out.sector[k] = en.block;
    const auto& idx = blocks[en.block];
    const auto src = parts[en.block].vectors.row(en.local);
    auto dst = out.vectors.row(k);
    for (std::size_t r = 0; r < idx.size(); ++r) dst[idx[r]] = src[r];
    fix_sign(dst);
  }

  if (options.verify) {
    const SpectrumCheck chk = check_spectrum(h, out);
    if (!chk.within(options.tol)) {
      std::ostringstream msg;
      msg << "diagonalize: accuracy contract violated (orthonormality " << chk.orthonormality << ", residual "
          << chk.residual << ", tol " << options.tol << ")";
      throw KernelError(msg.str());
    }
  }
  return out;
}

Spectrum diagonalize(const HamiltonianMatrix& h, const DiagonalizeOptions& options) {
  return diagonalize(h.matrix, options);
}

SpectrumCheck check_spectrum(const DenseMatrix& h, const Spectrum& s) {
  const std::size_t n = s.dim();
  SpectrumCheck chk;
  for (std::size_t k = 1; k < n; ++k)
    if (s.values[k] < s.values[k - 1]) chk.sorted = false;

  // Row-wise nonzero lists make the residual cheap for sparse model matrices.
  std::vector<std::vector<std::pair<std::size_t, double>>> nz(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (h(i, j) != 0.0) nz[i].emplace_back(j, h(i, j));
  const double norm = frobenius_norm(h);

  double orth = 0.0;
  double res = 0.0;
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) reduction(max : orth, res)
  for (std::ptrdiff_t sk = 0; sk < sn; ++sk) {
    const auto k = static_cast<std::size_t>(sk);
    const auto vk = s.eigenvector(k);
    for (std::size_t l = k; l < n; ++l) {
      const auto vl = s.eigenvector(l);
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) g += vk[i] * vl[i];
      orth = std::max(orth, std::abs(g - (k == l ? 1.0 : 0.0)));
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double hv = 0.0;
      for (const auto& [j, v] : nz[i]) hv += v * vk[j];
      const double d = hv - s.values[k] * vk[i];
      r2 += d * d;
    }
    res = std::max(res, norm > 0.0 ? std::sqrt(r2) / norm : std::sqrt(r2));
  }
  chk.orthonormality = orth;
  chk.residual = res;
  return chk;
}

namespace {

constexpr char kMagic[8] = {'P', 'M', 'S', 'P', 'E', 'C', '0', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
  std::uint64_t bits;
  static_assert(sizeof(T) == 8);
  std::memcpy(&bits, &value, 8);
  unsigned char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw ValidationError("spectrum file truncated");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum, const ConfigHash& hash) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic, 8);
  os.write(reinterpret_cast<const char*>(hash.data()), static_cast<std::streamsize>(hash.size()));
  const std::size_t n = spectrum.dim();
  put_le<std::uint64_t>(os, n);
  for (double v : spectrum.values) put_le(os, v);
  for (double v : spectrum.vectors.storage()) put_le(os, v);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

SpectrumFile read_spectrum(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw ValidationError(path.string() + ": not a spectrum file");
  SpectrumFile f;
  if (!is.read(reinterpret_cast<char*>(f.hash.data()), static_cast<std::streamsize>(f.hash.size())))
    throw ValidationError("spectrum file truncated");
  const auto n = get_le<std::uint64_t>(is);
  if (n == 0 || n > (std::uint64_t{1} << 20)) throw ValidationError(path.string() + ": implausible dimension");
  f.spectrum.values.resize(n);
  for (auto& v : f.spectrum.values) v = get_le<double>(is);
  f.spectrum.vectors = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n * n; ++i) f.spectrum.vectors.data()[i] = get_le<double>(is);
  return f;
}

}  // namespace phasemem
