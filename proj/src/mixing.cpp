// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/mixing.hpp"

#include "phasemem/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include <omp.h>

namespace phasemem {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double total = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(std::span<const double> e, std::span<const double> w) {
  Moments m;
  for (std::size_t i = 0; i < e.size(); ++i) {
    m.total += w[i];
    m.mean += w[i] * e[i];
  }
  if (m.total <= 0.0) return m;
  m.mean /= m.total;
  for (std::size_t i = 0; i < e.size(); ++i) m.variance += w[i] * (e[i] - m.mean) * (e[i] - m.mean);
  m.variance /= m.total;
  return m;
}

WidthEstimate histogram_fwhm(std::span<const double> e, std::span<const double> w, const WidthOptions& opt) {
  WidthEstimate est{0.0, WidthMethod::HistogramFwhm, 0.0};
  const Moments m = moments(e, w);
  est.centroid = m.mean;
  if (m.total <= 0.0 || m.variance <= 0.0) return est;
  const double sigma = std::sqrt(m.variance);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (w[i] > 0.0) {
      lo = std::min(lo, e[i]);
      hi = std::max(hi, e[i]);
    }
  double bin = opt.bin_width > 0.0 ? opt.bin_width : sigma / 8.0;
  const double pad = 4.0 * std::max(opt.smoothing_bins, 1.0);
  constexpr std::size_t kMaxBins = std::size_t{1} << 20;
  if ((hi - lo) / bin + 2 * pad > static_cast<double>(kMaxBins)) bin = (hi - lo) / static_cast<double>(kMaxBins / 2);
  const double origin = lo - pad * bin;
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / bin + 2 * pad)) + 1;

  // Linear (cloud-in-cell) deposition onto bin centers origin + b * bin.
  std::vector<double> hist(nbins, 0.0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (w[i] <= 0.0) continue;
    const double x = (e[i] - origin) / bin;
    const auto b = static_cast<std::size_t>(x);
    const double frac = x - static_cast<double>(b);
    hist[b] += w[i] * (1.0 - frac);
    if (b + 1 < nbins) hist[b + 1] += w[i] * frac;
  }
  std::vector<double> smooth = hist;
  if (opt.smoothing_bins > 0.0) {
    const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * opt.smoothing_bins));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    for (std::ptrdiff_t t = -half; t <= half; ++t) {
      const double z = static_cast<double>(t) / opt.smoothing_bins;
      kernel[static_cast<std::size_t>(t + half)] = std::exp(-0.5 * z * z);
    }
    const auto nb = static_cast<std::ptrdiff_t>(nbins);
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
      double acc = 0.0;
      for (std::ptrdiff_t t = -half; t <= half; ++t) {
        const std::ptrdiff_t src = b + t;
        if (src >= 0 && src < nb) acc += kernel[static_cast<std::size_t>(t + half)] * hist[static_cast<std::size_t>(src)];
      }
      smooth[static_cast<std::size_t>(b)] = acc;
    }
  }

  const auto peak = static_cast<std::size_t>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  const double halfmax = smooth[peak] / 2.0;
  std::size_t l = peak;
  while (l > 0 && smooth[l - 1] >= halfmax) --l;
  std::size_t r = peak;
  while (r + 1 < nbins && smooth[r + 1] >= halfmax) ++r;
  // Interpolate the half-maximum crossings between neighbouring bins.
  double left = static_cast<double>(l);
  if (l > 0) left -= (smooth[l] - halfmax) / (smooth[l] - smooth[l - 1]);
  double right = static_cast<double>(r);
  if (r + 1 < nbins) right += (smooth[r] - halfmax) / (smooth[r] - smooth[r + 1]);
  est.gamma_down = (right - left) * bin;
  est.centroid = origin + static_cast<double>(peak) * bin;
  return est;
}

}  // namespace

std::string_view to_string(WidthMethod m) noexcept {
  switch (m) {
    case WidthMethod::GaussianEquivalent: return "gaussian-equivalent";
    case WidthMethod::HistogramFwhm: return "histogram-fwhm";
    case WidthMethod::LorentzianTail: return "lorentzian-tail";
  }
  return "unknown";
}

WidthMethod parse_width_method(std::string_view s) {
  if (s == "gaussian-equivalent") return WidthMethod::GaussianEquivalent;
  if (s == "histogram-fwhm") return WidthMethod::HistogramFwhm;
  if (s == "lorentzian-tail") return WidthMethod::LorentzianTail;
  throw ValidationError("unknown width method '" + std::string(s) +
                        "' (expected gaussian-equivalent|histogram-fwhm|lorentzian-tail)");
}

MixingProfile mixing_weights(const Spectrum& spectrum, const RegisterBasis& basis, std::size_t k) {
  if (k >= spectrum.dim())
    throw ValidationError("eigenstate index " + std::to_string(k) + " out of range [0, " +
                          std::to_string(spectrum.dim()) + ")");
  if (basis.dim() != spectrum.dim()) throw ValidationError("register basis and spectrum dimensions differ");
  MixingProfile p;
  p.eigen_index = k;
  p.eigenvalue = spectrum.values[k];
  p.energies = basis.energies;
  const auto v = spectrum.eigenvector(k);
  p.weights.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p.weights[i] = v[i] * v[i];
  return p;
}

StrengthFunction ldos(const Spectrum& spectrum, const RegisterBasis& basis, std::size_t i) {
  if (i >= spectrum.dim())
    throw ValidationError("register index " + std::to_string(i) + " out of range [0, " +
                          std::to_string(spectrum.dim()) + ")");
  if (basis.dim() != spectrum.dim()) throw ValidationError("register basis and spectrum dimensions differ");
  StrengthFunction s;
  s.register_index = i;
  s.register_energy = basis.energies[i];
  s.energies = spectrum.values;
  s.weights.resize(spectrum.dim());
  for (std::size_t k = 0; k < spectrum.dim(); ++k) {
    const double c = spectrum.component(i, k);
    s.weights[k] = c * c;
  }
  return s;
}

WidthEstimate spreading_width(std::span<const double> energies, std::span<const double> weights, double reference,
                              const WidthOptions& options) {
  if (energies.size() != weights.size()) throw ValidationError("spreading_width: energies/weights size mismatch");
  switch (options.method) {
    case WidthMethod::GaussianEquivalent: {
      const Moments m = moments(energies, weights);
      return {kFwhmPerSigma * std::sqrt(std::max(m.variance, 0.0)), options.method, m.mean};
    }
    case WidthMethod::HistogramFwhm:
      return histogram_fwhm(energies, weights, options);
    case WidthMethod::LorentzianTail: {
      if (!(options.tail_cutoff > 0.0)) throw ValidationError("lorentzian-tail: tail_cutoff must be > 0");
      double outside = 0.0;
      for (std::size_t i = 0; i < energies.size(); ++i)
        if (std::abs(energies[i] - reference) > options.tail_cutoff) outside += weights[i];
      return {std::numbers::pi * options.tail_cutoff * outside, options.method, reference};
    }
  }
  return {};
}

WidthEstimate spreading_width(const MixingProfile& profile, const WidthOptions& options) {
  return spreading_width(profile.energies, profile.weights, profile.eigenvalue, options);
}

WidthEstimate spreading_width(const StrengthFunction& strength, const WidthOptions& options) {
  return spreading_width(strength.energies, strength.weights, strength.register_energy, options);
}

double participation_ratio(std::span<const double> weights) {
  double s2 = 0.0;
  for (double w : weights) s2 += w * w;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

double participation_ratio(const MixingProfile& profile) { return participation_ratio(profile.weights); }
double participation_ratio(const StrengthFunction& strength) {
  // Weights of an exactly degenerate cluster are pooled: the split among the
  // cluster's eigenvectors depends on an arbitrary basis choice.
  double scale = 1.0;
  for (double e : strength.energies) scale = std::max(scale, std::abs(e));
  const double tol = 1e-10 * scale;
  std::vector<double> pooled;
  pooled.reserve(strength.weights.size());
  for (std::size_t k = 0; k < strength.weights.size(); ++k) {
    if (k > 0 && strength.energies[k] - strength.energies[k - 1] <= tol)
      pooled.back() += strength.weights[k];
    else
      pooled.push_back(strength.weights[k]);
  }
  return participation_ratio(pooled);
}

SpacingStats spacing_ratio_stats(std::span<const double> ev) {
  if (ev.size() < 3) throw ValidationError("spacing_ratio_stats: need at least 3 levels, got " + std::to_string(ev.size()));
  SpacingStats st;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < ev.size(); ++k)
    if (ev[k + 1] - ev[k] == 0.0) ++st.zero_gaps;
  for (std::size_t k = 0; k + 2 < ev.size(); ++k) {
    const double s0 = ev[k + 1] - ev[k];
    const double s1 = ev[k + 2] - ev[k + 1];
    if (s0 == 0.0 || s1 == 0.0) continue;
    sum += std::min(s0, s1) / std::max(s0, s1);
    ++st.ratios;
  }
  st.mean_ratio = st.ratios > 0 ? sum / static_cast<double>(st.ratios) : kNaN;
  return st;
}

SpacingStats spacing_ratio_stats(std::span<const double> ev, std::span<const std::size_t> sector) {
  if (sector.empty()) return spacing_ratio_stats(ev);
  if (sector.size() != ev.size()) throw ValidationError("spacing_ratio_stats: sector labels and levels differ in size");
  std::map<std::size_t, std::vector<double>> split;
  for (std::size_t k = 0; k < ev.size(); ++k) split[sector[k]].push_back(ev[k]);
  SpacingStats total;
  double sum = 0.0;
  bool any = false;
  for (const auto& [label, levels] : split) {
    if (levels.size() < 3) continue;
    any = true;
    const SpacingStats st = spacing_ratio_stats(levels);
    total.zero_gaps += st.zero_gaps;
    total.ratios += st.ratios;
    if (st.ratios > 0) sum += st.mean_ratio * static_cast<double>(st.ratios);
  }
  if (!any) return spacing_ratio_stats(ev);
  total.mean_ratio = total.ratios > 0 ? sum / static_cast<double>(total.ratios) : kNaN;
  return total;
}

Window central_window(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("window fraction must be in (0, 1]");
  auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  count = std::clamp<std::size_t>(count, 1, n);
  const std::size_t first = (n - count) / 2;
  return {first, first + count};
}

RealizationStats realization_stats(const Spectrum& spectrum, const RegisterBasis& basis, double window_fraction,
                                   const WidthOptions& width) {
  const std::size_t n = spectrum.dim();
  if (basis.dim() != n) throw ValidationError("register basis and spectrum dimensions differ");
  const Window win = central_window(n, window_fraction);
  RealizationStats st;
  std::vector<double> w(n);
  for (std::size_t k = win.first; k < win.last; ++k) {
    const auto v = spectrum.eigenvector(k);
    for (std::size_t i = 0; i < n; ++i) w[i] = v[i] * v[i];
    st.gamma_mean += spreading_width(basis.energies, w, spectrum.values[k], width).gamma_down;
    st.pr_mean += participation_ratio(w);
  }
  const auto count = static_cast<double>(win.last - win.first);
  st.gamma_mean /= count;
  st.pr_mean /= count;

  // Spacing ratios need 3 levels; widen to the full spectrum for tiny windows.
  // Levels of different symmetry sectors do not repel, so each sector is
  // treated as its own sequence.
  std::span<const double> levels(spectrum.values);
  std::span<const std::size_t> sectors(spectrum.sector);
  if (win.last - win.first >= 3) {
    levels = levels.subspan(win.first, win.last - win.first);
    if (!sectors.empty()) sectors = sectors.subspan(win.first, win.last - win.first);
  }
  if (levels.size() >= 3) {
    const SpacingStats sp = spacing_ratio_stats(levels, sectors);
    st.r_mean = sp.mean_ratio;
    st.zero_gaps = sp.zero_gaps;
  } else {
    st.r_mean = kNaN;
  }
  return st;
}

namespace {

void mean_sd(const std::vector<double>& xs, double& mean, double& sd) {
  std::size_t cnt = 0;
  double s = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) {
      s += x;
      ++cnt;
    }
  if (cnt == 0) {
    mean = sd = kNaN;
    return;
  }
  mean = s / static_cast<double>(cnt);
  double v = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) v += (x - mean) * (x - mean);
  sd = cnt > 1 ? std::sqrt(v / static_cast<double>(cnt - 1)) : 0.0;
}

}  // namespace

ScanResult chaos_scan(const ModelConfig& base, const ScanOptions& options) {
  if (options.grid.empty()) throw ValidationError("chaos_scan: grid is empty");
  if (options.realizations < 1) throw ValidationError("chaos_scan: realizations must be >= 1");
  if (options.workers < 1) throw ValidationError("chaos_scan: workers must be >= 1");
  for (double g : options.grid)
    if (!(g >= 0.0)) throw ValidationError("chaos_scan: grid values must be >= 0");
  if (auto errs = base.validate(); !errs.empty()) throw ValidationError(errs.front());
  (void)central_window(1, options.window_fraction);

  const auto R = static_cast<std::ptrdiff_t>(options.realizations);
  // Outer parallelism over realizations; kernels stay serial inside a worker.
  const kernels::Exec inner = options.workers > 1 ? kernels::Exec::Serial : kernels::Exec::Parallel;

  ScanResult result;
  for (std::size_t g = 0; g < options.grid.size(); ++g) {
    ModelConfig cfg = base;
    cfg.j_bound = options.grid[g] * base.delta0;
    std::vector<RealizationStats> stats(options.realizations);
    std::vector<std::string> failures(options.realizations);

#pragma omp parallel for schedule(dynamic, 1) num_threads(options.workers)
    for (std::ptrdiff_t r = 0; r < R; ++r) {
      try {
        const CouplingDraw draw = draw_couplings(cfg, static_cast<std::uint64_t>(r));
        const HamiltonianMatrix h = build_hamiltonian(draw, cfg);
        const RegisterBasis basis = register_basis(draw, cfg.n, cfg.coupling_op);
        DiagonalizeOptions dopt;
        dopt.exec = inner;
        const Spectrum spectrum = diagonalize(h, dopt);
        stats[static_cast<std::size_t>(r)] = realization_stats(spectrum, basis, options.window_fraction, options.width);
      } catch (const std::exception& ex) {
        failures[static_cast<std::size_t>(r)] = ex.what();
      }
    }
    for (std::size_t r = 0; r < options.realizations; ++r)
      if (!failures[r].empty())
        throw KernelError("grid point " + std::to_string(g) + " (J/Delta0 = " + std::to_string(options.grid[g]) +
                          "), realization " + std::to_string(r) + ": " + failures[r]);

    ScanPoint pt;
    pt.j_over_delta0 = options.grid[g];
    pt.realizations = options.realizations;
    std::vector<double> gam, pr, rr;
    for (const auto& s : stats) {
      gam.push_back(s.gamma_mean);
      pr.push_back(s.pr_mean);
      rr.push_back(s.r_mean);
      pt.zero_gaps += s.zero_gaps;
    }
    mean_sd(gam, pt.gamma_mean, pt.gamma_sd);
    mean_sd(pr, pt.pr_mean, pt.pr_sd);
    mean_sd(rr, pt.r_mean, pt.r_sd);
    result.points.push_back(pt);
    if (options.on_point) options.on_point(g, pt);
  }
  return result;
}

}  // namespace phasemem
