// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file mixing.hpp
 * @brief Eigenstate mixing observables: weight profiles over register
 *        energies, local densities of states, spreading widths,
 *        participation ratios, level-spacing ratios, and the ensemble scan
 *        across coupling strength.
 */

#pragma once

#include "phasemem/model.hpp"
#include "phasemem/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace phasemem {

/// W_i = |<Psi_i|phi_k>|^2 over all register states, for one eigenstate k.
struct MixingProfile {
  std::size_t eigen_index = 0;
  double eigenvalue = 0.0;
  std::vector<double> energies;  ///< E_i, register order
  std::vector<double> weights;   ///< W_i, register order
};

/// Strength function (LDOS) of register state i over the exact eigenenergies.
struct StrengthFunction {
  std::size_t register_index = 0;
  double register_energy = 0.0;
  std::vector<double> energies;  ///< lambda_k, ascending
  std::vector<double> weights;
};

enum class WidthMethod {
  GaussianEquivalent,  ///< 2 sqrt(2 ln 2) times the second-moment spread
  HistogramFwhm,       ///< FWHM of a Gaussian-smoothed weight histogram
  LorentzianTail,      ///< Breit-Wigner width from the weight beyond a cutoff
};

std::string_view to_string(WidthMethod m) noexcept;
WidthMethod parse_width_method(std::string_view s);  // throws ValidationError

struct WidthOptions {
  WidthMethod method = WidthMethod::GaussianEquivalent;
  /// HistogramFwhm: bin width in energy units; <= 0 picks sigma/8.
  double bin_width = 0.0;
  /// HistogramFwhm: Gaussian smoothing in bins.
  double smoothing_bins = 1.0;
  /// LorentzianTail: cutoff x from the reference energy; the estimate
  /// pi * x * W(|E - E_ref| > x) is a Lorentzian FWHM when x >> width.
  double tail_cutoff = 0.25;
};

struct WidthEstimate {
  double gamma_down = 0.0;
  WidthMethod method = WidthMethod::GaussianEquivalent;
  double centroid = 0.0;  ///< first moment, histogram peak, or reference energy
};

MixingProfile mixing_weights(const Spectrum& spectrum, const RegisterBasis& basis, std::size_t k);
StrengthFunction ldos(const Spectrum& spectrum, const RegisterBasis& basis, std::size_t i);

/// Width of a weight distribution. `reference` is the energy the tail
/// estimator measures from (the eigenvalue or the register energy).
WidthEstimate spreading_width(std::span<const double> energies, std::span<const double> weights, double reference,
                              const WidthOptions& options = {});
WidthEstimate spreading_width(const MixingProfile& profile, const WidthOptions& options = {});
WidthEstimate spreading_width(const StrengthFunction& strength, const WidthOptions& options = {});

double participation_ratio(std::span<const double> weights);
double participation_ratio(const MixingProfile& profile);
/// Eigenvalues closer than 1e-10 * max(1, max|lambda|) count as one level.
double participation_ratio(const StrengthFunction& strength);

struct SpacingStats {
  double mean_ratio = 0.0;      ///< <r>, NaN when no nonzero adjacent gaps
  std::size_t ratios = 0;       ///< number of r_k averaged
  std::size_t zero_gaps = 0;    ///< gaps excluded as exact degeneracies
};

/// r_k = min(s_k, s_k+1) / max(s_k, s_k+1) over consecutive gaps of a sorted
/// sequence; ratios touching a zero gap are skipped. Needs >= 3 levels.
SpacingStats spacing_ratio_stats(std::span<const double> eigenvalues);

/// Ratios taken within each sector's own sub-sequence and pooled; sectors
/// with fewer than 3 levels contribute nothing.  Falls back to the whole
/// sequence when no sector has 3 levels or `sector` is empty.
SpacingStats spacing_ratio_stats(std::span<const double> eigenvalues, std::span<const std::size_t> sector);

/// Reference <r> for independent (Poisson) levels.
inline constexpr double kPoissonMeanRatio = 0.38629436111989061;  // 2 ln 2 - 1

/// Index range [first, last) of the central `fraction` of N eigenstates.
struct Window {
  std::size_t first = 0;
  std::size_t last = 0;
};
Window central_window(std::size_t n, double fraction);

/// Window statistics for one realization.
struct RealizationStats {
  double gamma_mean = 0.0;
  double pr_mean = 0.0;
  double r_mean = 0.0;  ///< NaN when fewer than 3 levels
  std::size_t zero_gaps = 0;
};

RealizationStats realization_stats(const Spectrum& spectrum, const RegisterBasis& basis, double window_fraction,
                                   const WidthOptions& width);

struct ScanPoint {
  double j_over_delta0 = 0.0;
  std::size_t realizations = 0;
  double gamma_mean = 0.0;
  double gamma_sd = 0.0;
  double pr_mean = 0.0;
  double pr_sd = 0.0;
  double r_mean = 0.0;
  double r_sd = 0.0;
  std::size_t zero_gaps = 0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
};

struct ScanOptions {
  std::vector<double> grid;          ///< J / Delta0 values
  std::size_t realizations = 10;
  double window_fraction = 0.25;
  WidthOptions width;
  int workers = 1;
  /// Called with each completed point, in grid order.
  std::function<void(std::size_t, const ScanPoint&)> on_point;
};

/// Builds, diagonalizes and summarizes R realizations per grid point.
/// Realizations run concurrently; reduction order is (grid index,
/// realization index), so results do not depend on `workers`. Kernel
/// failures are rethrown as KernelError with grid/realization context.
ScanResult chaos_scan(const ModelConfig& base, const ScanOptions& options);

}  // namespace phasemem
