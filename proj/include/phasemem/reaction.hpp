// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file reaction.hpp
 * @brief Reaction-data protocol: Coulomb-penetrability scaling of emission
 *        spectra, nuclear-temperature fits, Legendre fits of angular
 *        distributions with their odd-term asymmetry, time-scale and
 *        effective Hilbert-dimension estimates, and a synthetic data
 *        generator with known ground truth.
 *
 * Units: energies in MeV (Gamma_cn in keV where named), lengths in fm,
 * angles in degrees, masses in atomic mass units.
 */

#pragma once

#include "phasemem/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phasemem::reaction {

inline constexpr double kCoulombE2 = 1.43996448;        // e^2 / (4 pi eps0), MeV fm
inline constexpr double kHbarC = 197.3269804;           // MeV fm
inline constexpr double kAtomicMassMeV = 931.49410242;  // MeV per u
inline constexpr double kHbarMeVSeconds = 6.582119569e-22;
inline constexpr double kProtonMassU = 1.007276466621;
inline constexpr double kDefaultRadius = 1.4;           // r0, fm
inline constexpr std::string_view kPenetrabilityModel = "s-wave-wkb";

/// Two-body Coulomb channel: projectile (charge, mass) on target (Z, A).
struct Channel {
  int z_projectile = 1;
  int z_target = 0;
  double a_target = 0.0;
  double r0 = kDefaultRadius;
  double projectile_mass_u = kProtonMassU;

  [[nodiscard]] double radius() const;            ///< R = r0 A^(1/3)
  [[nodiscard]] double barrier() const;           ///< B = Zp Zt e^2 / R
  [[nodiscard]] double reduced_mass_mev() const;  ///< mu c^2
  void validate() const;                          ///< throws ValidationError
};

/// WKB exponent G = (1/hbar) int_R^{r_c} sqrt(2 mu (V(r) - E)) dr in closed
/// form, 0 for E >= B.
double gamow_exponent(double energy, const Channel& channel);

/// s-wave WKB transmission P = exp(-2G), 1 at and above the barrier.
double coulomb_penetrability(double energy, const Channel& channel);

struct ParticleSpectrum {
  double angle_deg = 0.0;
  std::optional<double> beam_mev;
  std::optional<int> z_projectile;
  std::optional<int> z_target;
  std::optional<double> a_target;
  std::string label;
  std::vector<double> energy;     ///< strictly increasing
  std::vector<double> yield;
  std::vector<double> yield_err;
  std::vector<std::size_t> source_lines;  ///< input line per sample, empty for generated data

  void validate() const;
};

struct ScaledSpectrum {
  double angle_deg = 0.0;
  std::string label;
  std::vector<double> energy;
  std::vector<double> intensity;
  std::vector<double> intensity_err;
  double r0 = kDefaultRadius;
  std::string model = std::string(kPenetrabilityModel);
  std::size_t dropped = 0;  ///< samples with P below the underflow floor
};

inline constexpr double kPenetrabilityFloor = 1e-300;

/// I(E) = yield / (E P(E)). Throws ValidationError when Z/A metadata is missing.
ScaledSpectrum scale_spectrum(const ParticleSpectrum& spectrum, double r0 = kDefaultRadius);

struct EnergyWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Lowest third of the covered emission-energy range.
EnergyWindow default_temperature_window(const ScaledSpectrum& scaled);

struct TemperatureFit {
  double temperature = 0.0;  ///< MeV
  double temperature_err = 0.0;
  double slope = 0.0;        ///< d ln I / dE
  double intercept = 0.0;
  double chi2_dof = 0.0;
  std::size_t points = 0;
  EnergyWindow window;
  bool unit_weights = false;
};

/// Weighted least squares of ln I against E inside the window. Throws
/// FitError for fewer than 3 usable points or a non-negative slope.
TemperatureFit fit_temperature(const ScaledSpectrum& scaled, std::optional<EnergyWindow> window = std::nullopt);

struct AngularDistribution {
  std::vector<double> theta_deg;
  std::vector<double> dsdo;  ///< mb/sr
  std::vector<double> err;
  std::optional<double> e_min_mev;
  std::optional<double> e_max_mev;
  std::string label;
  std::vector<std::size_t> source_lines;

  void validate() const;
};

struct LegendreFit {
  std::vector<double> coefficients;  ///< a_0 .. a_max_order
  DenseMatrix covariance;
  int max_order = 2;
  double chi2 = 0.0;
  std::size_t dof = 0;
  double chi2_dof = 0.0;  ///< 0 when dof = 0
  bool unit_weights = false;
};

/// sum_k a_k P_k(x)
double legendre_series(const std::vector<double>& coefficients, double x);

/// Weighted linear least squares of dsigma/dOmega on P_k(cos theta),
/// k <= max_order, through a Householder QR of the weighted design matrix.
/// Unit weights (errors absent or non-positive) scale the covariance by chi2/dof.
LegendreFit fit_legendre(const AngularDistribution& dist, int max_order = 2);

struct AsymmetryReport {
  double ratio = 0.0;  ///< a_1 / a_0
  double ratio_err = 0.0;
  double significance = 0.0;  ///< ratio / ratio_err (0 if the error vanishes)
  double forward_backward = 0.0;  ///< I(0 deg) / I(180 deg) of the fitted series
  double forward_backward_err = 0.0;
  bool memory_retained = false;  ///< a_1 / a_0 > 0
};

AsymmetryReport asymmetry_report(const LegendreFit& fit);

struct PhaseTimeProxy {
  double value = 0.0;
  double error = 0.0;
  /// Model-dependent: no closed-form map to tau_decay / tau_phase is applied.
  std::string label = "a1/a0 proxy for tau_decay/tau_phase (model-dependent)";
};

PhaseTimeProxy phase_time_proxy(const LegendreFit& fit);

/// Bethe state density (sqrt(pi)/12) exp(2 sqrt(aU)) / (a^(1/4) U^(5/4)), per MeV.
double bethe_level_density(double a, double excitation);
/// Natural log of the same, usable where the density overflows.
double log_bethe_level_density(double a, double excitation);

/// Smallest q with N <= 2^q.
int qubit_equivalent(double n_eff);

struct LevelDensityParams {
  double a = 0.0;           ///< MeV^-1
  double excitation = 0.0;  ///< U, MeV
};

/// a = A/8; U = beam + separation - emission.
LevelDensityParams default_level_density(double mass_number, double beam_mev, double separation_mev,
                                         double emission_mev = 0.0);

struct TimescaleReport {
  double gamma_down_mev = 0.0;
  double gamma_cn_kev = 0.0;
  double time_ratio = 0.0;      ///< tau_process / tau_relax = Gamma_down / Gamma_cn
  double tau_relax_s = 0.0;     ///< hbar / Gamma_down
  double tau_process_s = 0.0;   ///< hbar / Gamma_cn
  double log2_n_eff = 0.0;
  double n_eff = 0.0;           ///< rho(U) * Gamma_down; inf if beyond double range
  int qubit_equiv = 0;
  LevelDensityParams level_density;
};

TimescaleReport timescale_report(double gamma_down_mev, double gamma_cn_kev, const LevelDensityParams& level_density);

struct SynthesisParams {
  double temperature = 0.7;     ///< T, MeV
  double endpoint = 12.0;       ///< Q: highest emission energy generated, MeV
  double e_min = 1.0;
  double e_step = 0.25;
  double direct_fraction = 0.0;  ///< f in (1 + f P_1(cos theta))
  std::vector<double> angles{30.0, 150.0};
  double noise = 0.05;           ///< relative (multiplicative) noise
  double normalization = 1.0;
  std::uint64_t seed = 1;
  double beam_mev = 18.0;
  Channel channel{1, 78, 195.0};
  /// Energy window integrated into the angular distribution; whole grid if unset.
  std::optional<EnergyWindow> angular_window;
  std::string label = "synthetic";

  void validate() const;
};

struct SyntheticData {
  std::vector<ParticleSpectrum> spectra;  ///< one per angle
  AngularDistribution angular;
};

/// yield(E, theta) = c E P(E) exp(-E/T) (1 + f P_1(cos theta)) times
/// (1 + noise z), z standard normal; yield_err = noise times the noiseless
/// yield. The angular distribution integrates the noisy yields over the window.
SyntheticData synthesize_spectrum(const SynthesisParams& params);

/// dsigma/dOmega(theta) = sum_k a_k P_k(cos theta) with Gaussian noise of
/// relative size `noise`; err holds the true standard deviations.
AngularDistribution synthesize_angular(const std::vector<double>& coefficients, const std::vector<double>& angles,
                                       double noise, std::uint64_t seed);

}  // namespace phasemem::reaction
