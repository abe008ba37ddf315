// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/reaction.hpp"

#include "phasemem/error.hpp"
#include "phasemem/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace phasemem::reaction {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Coulomb barrier

double Channel::radius() const { return r0 * std::cbrt(a_target); }

double Channel::barrier() const { return z_projectile * z_target * kCoulombE2 / radius(); }

double Channel::reduced_mass_mev() const {
  return projectile_mass_u * a_target / (projectile_mass_u + a_target) * kAtomicMassMeV;
}

void Channel::validate() const {
  if (!(r0 > 0.0)) throw ValidationError("channel: radius parameter r0 must be > 0 (got " + num(r0) + ")");
  if (z_projectile < 1 || z_target < 1) throw ValidationError("channel: charges must be >= 1");
  if (!(a_target >= 1.0)) throw ValidationError("channel: target mass number must be >= 1");
  if (!(projectile_mass_u > 0.0)) throw ValidationError("channel: projectile mass must be > 0");
}

double gamow_exponent(double energy, const Channel& ch) {
  if (!(energy > 0.0)) throw ValidationError("penetrability: energy must be > 0 (got " + num(energy) + ")");
  ch.validate();
  const double b = ch.barrier();
  if (energy >= b) return 0.0;
  // With x = E/B = R/r_c:  int_R^{r_c} sqrt(k/r - E) dr = (k/sqrt(E)) (acos sqrt(x) - sqrt(x(1-x)))
  const double k = ch.z_projectile * ch.z_target * kCoulombE2;
  const double x = energy / b;
  const double shape = std::acos(std::sqrt(x)) - std::sqrt(x * (1.0 - x));
  return std::sqrt(2.0 * ch.reduced_mass_mev()) / kHbarC * (k / std::sqrt(energy)) * shape;
}

double coulomb_penetrability(double energy, const Channel& channel) {
  return std::exp(-2.0 * gamow_exponent(energy, channel));
}

// ---------------------------------------------------------------------------
// Spectra

void ParticleSpectrum::validate() const {
  if (energy.size() != yield.size() || energy.size() != yield_err.size())
    throw ValidationError("spectrum: column lengths differ");
  auto where = [&](std::size_t i) {
    return i < source_lines.size() ? " (line " + std::to_string(source_lines[i]) + ")" : " (sample " + std::to_string(i) + ")";
  };
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (i > 0 && !(energy[i] > energy[i - 1])) throw ValidationError("spectrum: energies not strictly increasing" + where(i));
    if (!(yield[i] >= 0.0)) throw ValidationError("spectrum: negative yield" + where(i));
    if (!(yield_err[i] >= 0.0)) throw ValidationError("spectrum: negative yield error" + where(i));
  }
}

ScaledSpectrum scale_spectrum(const ParticleSpectrum& spec, double r0) {
  std::string missing;
  if (!spec.z_projectile) missing += " Zp";
  if (!spec.z_target) missing += " Zt";
  if (!spec.a_target) missing += " At";
  if (!missing.empty()) throw ValidationError("scale_spectrum: missing metadata:" + missing);
  spec.validate();
  const Channel ch{*spec.z_projectile, *spec.z_target, *spec.a_target, r0};
  ch.validate();

  ScaledSpectrum out;
  out.angle_deg = spec.angle_deg;
  out.label = spec.label;
  out.r0 = r0;
  for (std::size_t i = 0; i < spec.energy.size(); ++i) {
    const double e = spec.energy[i];
    const double p = coulomb_penetrability(e, ch);
    if (p < kPenetrabilityFloor) {
      ++out.dropped;
      continue;
    }
    const double scale = 1.0 / (e * p);
    out.energy.push_back(e);
    out.intensity.push_back(spec.yield[i] * scale);
    out.intensity_err.push_back(spec.yield_err[i] * scale);
  }
  return out;
}

EnergyWindow default_temperature_window(const ScaledSpectrum& s) {
  if (s.energy.empty()) throw FitError("temperature fit: spectrum is empty");
  const double lo = s.energy.front();
  const double hi = s.energy.back();
  return {lo, lo + (hi - lo) / 3.0};
}

TemperatureFit fit_temperature(const ScaledSpectrum& s, std::optional<EnergyWindow> window) {
  TemperatureFit fit;
  fit.window = window ? *window : default_temperature_window(s);
  std::vector<double> x, y, sig;
  for (std::size_t i = 0; i < s.energy.size(); ++i) {
    const double e = s.energy[i];
    if (e < fit.window.lo || e > fit.window.hi || !(s.intensity[i] > 0.0)) continue;
    x.push_back(e);
    y.push_back(std::log(s.intensity[i]));
    sig.push_back(s.intensity_err[i] / s.intensity[i]);
  }
  fit.points = x.size();
  if (x.size() < 3)
    throw FitError("temperature fit: " + std::to_string(x.size()) + " usable points in [" + num(fit.window.lo) + ", " +
                   num(fit.window.hi) + "] MeV, need >= 3");
  fit.unit_weights = std::any_of(sig.begin(), sig.end(), [](double v) { return !(v > 0.0); });

  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = fit.unit_weights ? 1.0 : 1.0 / (sig[i] * sig[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = fit.unit_weights ? 1.0 : 1.0 / (sig[i] * sig[i]);
    sxx += w * (x[i] - xm) * (x[i] - xm);
    sxy += w * (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw FitError("temperature fit: window holds a single energy");
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = fit.unit_weights ? 1.0 : 1.0 / (sig[i] * sig[i]);
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    chi2 += w * r * r;
  }
  const double dof = static_cast<double>(x.size() - 2);
  fit.chi2_dof = chi2 / dof;
  double var_slope = 1.0 / sxx;
  if (fit.unit_weights) var_slope *= fit.chi2_dof;
  if (!(fit.slope < 0.0))
    throw FitError("temperature fit: no evaporation regime in window (slope " + num(fit.slope) + " >= 0)");
  fit.temperature = -1.0 / fit.slope;
  fit.temperature_err = std::sqrt(var_slope) / (fit.slope * fit.slope);
  return fit;
}

// ---------------------------------------------------------------------------
// Angular distributions

void AngularDistribution::validate() const {
  if (theta_deg.size() != dsdo.size() || theta_deg.size() != err.size())
    throw ValidationError("angular distribution: column lengths differ");
  for (std::size_t i = 0; i < theta_deg.size(); ++i) {
    const std::string at = i < source_lines.size() ? " (line " + std::to_string(source_lines[i]) + ")" : "";
    if (!(theta_deg[i] > 0.0 && theta_deg[i] < 180.0)) throw ValidationError("angular distribution: theta outside (0, 180)" + at);
    if (!(dsdo[i] >= 0.0)) throw ValidationError("angular distribution: negative cross section" + at);
  }
}

double legendre_series(const std::vector<double>& a, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::legendre(static_cast<unsigned>(k), x);
  return s;
}

LegendreFit fit_legendre(const AngularDistribution& dist, int max_order) {
  if (max_order < 0) throw ValidationError("legendre fit: max_order must be >= 0");
  dist.validate();
  const std::size_t m = dist.theta_deg.size();
  const auto p = static_cast<std::size_t>(max_order) + 1;
  if (m <= static_cast<std::size_t>(max_order))
    throw FitError("legendre fit: underdetermined (" + std::to_string(m) + " points for order " +
                   std::to_string(max_order) + ")");

  LegendreFit fit;
  fit.max_order = max_order;
  fit.unit_weights = std::any_of(dist.err.begin(), dist.err.end(), [](double e) { return !(e > 0.0); });
  std::vector<double> w(m);
  double wsum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = fit.unit_weights ? 1.0 : 1.0 / (dist.err[i] * dist.err[i]);
    wsum += w[i];
  }
  if (!(wsum > 0.0)) throw FitError("legendre fit: all weights are zero");

  // Weighted design matrix A (m x p) and right-hand side b.
  DenseMatrix a(m, p);
  std::vector<double> b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double sw = std::sqrt(w[i]);
    const double x = std::cos(dist.theta_deg[i] * std::numbers::pi / 180.0);
    for (std::size_t k = 0; k < p; ++k) a(i, k) = sw * std::legendre(static_cast<unsigned>(k), x);
    b[i] = sw * dist.dsdo[i];
  }

  // Householder QR: A = Q R, applied to b on the fly.
  std::vector<double> v(m);
  double rmax = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) throw FitError("legendre fit: design matrix is rank deficient");
    const double alpha = a(k, k) > 0 ? -norm : norm;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      v[i] = a(i, k) - (i == k ? alpha : 0.0);
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 > 0.0) {
      for (std::size_t j = k; j < p; ++j) {
        double d = 0.0;
        for (std::size_t i = k; i < m; ++i) d += v[i] * a(i, j);
        d = 2.0 * d / vnorm2;
        for (std::size_t i = k; i < m; ++i) a(i, j) -= d * v[i];
      }
      double d = 0.0;
      for (std::size_t i = k; i < m; ++i) d += v[i] * b[i];
      d = 2.0 * d / vnorm2;
      for (std::size_t i = k; i < m; ++i) b[i] -= d * v[i];
    }
    rmax = std::max(rmax, std::abs(a(k, k)));
  }
  for (std::size_t k = 0; k < p; ++k)
    if (std::abs(a(k, k)) <= 1e-12 * rmax) throw FitError("legendre fit: design matrix is rank deficient");

  fit.coefficients.assign(p, 0.0);
  for (std::size_t k = p; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= a(k, j) * fit.coefficients[j];
    fit.coefficients[k] = s / a(k, k);
  }
  fit.chi2 = 0.0;
  for (std::size_t i = p; i < m; ++i) fit.chi2 += b[i] * b[i];
  fit.dof = m - p;
  fit.chi2_dof = fit.dof > 0 ? fit.chi2 / static_cast<double>(fit.dof) : 0.0;

  // cov = R^-1 R^-T
  DenseMatrix rinv(p, p);
  for (std::size_t c = 0; c < p; ++c) {
    rinv(c, c) = 1.0 / a(c, c);
    for (std::size_t r = c; r-- > 0;) {
      double s = 0.0;
      for (std::size_t j = r + 1; j <= c; ++j) s += a(r, j) * rinv(j, c);
      rinv(r, c) = -s / a(r, r);
    }
  }
  fit.covariance = DenseMatrix(p, p);
  const double scale = fit.unit_weights && fit.dof > 0 ? fit.chi2_dof : 1.0;
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      double s = 0.0;
      for (std::size_t j = std::max(r, c); j < p; ++j) s += rinv(r, j) * rinv(c, j);
      fit.covariance(r, c) = scale * s;
    }
  return fit;
}

AsymmetryReport asymmetry_report(const LegendreFit& fit) {
  if (fit.coefficients.empty() || !(fit.coefficients[0] > 0.0))
    throw FitError("asymmetry: a_0 must be > 0");
  const auto& a = fit.coefficients;
  const std::size_t p = a.size();
  const auto& cov = fit.covariance;
  auto quad = [&](const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c) s += g[r] * cov(r, c) * g[c];
    return std::sqrt(std::max(s, 0.0));
  };

  AsymmetryReport rep;
  const double a0 = a[0];
  const double a1 = p > 1 ? a[1] : 0.0;
  rep.ratio = a1 / a0;
  std::vector<double> g(p, 0.0);
  g[0] = -a1 / (a0 * a0);
  if (p > 1) g[1] = 1.0 / a0;
  rep.ratio_err = quad(g);
  rep.significance = rep.ratio_err > 0.0 ? rep.ratio / rep.ratio_err : 0.0;
  rep.memory_retained = rep.ratio > 0.0;

  double fwd = 0.0, bwd = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    fwd += a[k];
    bwd += (k % 2 == 0 ? 1.0 : -1.0) * a[k];
  }
  rep.forward_backward = fwd / bwd;
  for (std::size_t k = 0; k < p; ++k) g[k] = (bwd - fwd * (k % 2 == 0 ? 1.0 : -1.0)) / (bwd * bwd);
  rep.forward_backward_err = quad(g);
  return rep;
}

PhaseTimeProxy phase_time_proxy(const LegendreFit& fit) {
  const AsymmetryReport rep = asymmetry_report(fit);
  PhaseTimeProxy proxy;
  proxy.value = rep.ratio;
  proxy.error = rep.ratio_err;
  return proxy;
}

// ---------------------------------------------------------------------------
// Time scales and effective dimension

double log_bethe_level_density(double a, double u) {
  if (!(a > 0.0)) throw ValidationError("level density: parameter a must be > 0 (got " + num(a) + ")");
  if (!(u > 0.0)) throw ValidationError("level density: excitation U must be > 0 (got " + num(u) + ")");
  return std::log(std::sqrt(std::numbers::pi) / 12.0) + 2.0 * std::sqrt(a * u) - 0.25 * std::log(a) - 1.25 * std::log(u);
}

double bethe_level_density(double a, double u) { return std::exp(log_bethe_level_density(a, u)); }

int qubit_equivalent(double n_eff) {
  if (!(n_eff > 0.0) || !std::isfinite(n_eff)) throw ValidationError("qubit_equivalent: N_eff must be positive and finite");
  auto q = static_cast<int>(std::ceil(std::log2(n_eff)));
  while (std::ldexp(1.0, q - 1) >= n_eff) --q;
  while (std::ldexp(1.0, q) < n_eff) ++q;
  return q;
}

LevelDensityParams default_level_density(double mass_number, double beam_mev, double separation_mev,
                                         double emission_mev) {
  if (!(mass_number > 0.0)) throw ValidationError("level density: mass number must be > 0");
  return {mass_number / 8.0, beam_mev + separation_mev - emission_mev};
}

TimescaleReport timescale_report(double gamma_down_mev, double gamma_cn_kev, const LevelDensityParams& ld) {
  if (!(gamma_down_mev > 0.0)) throw ValidationError("timescale: Gamma_down must be > 0");
  if (!(gamma_cn_kev > 0.0)) throw ValidationError("timescale: Gamma_cn must be > 0");
  TimescaleReport rep;
  rep.gamma_down_mev = gamma_down_mev;
  rep.gamma_cn_kev = gamma_cn_kev;
  rep.level_density = ld;
  rep.time_ratio = gamma_down_mev * 1000.0 / gamma_cn_kev;
  rep.tau_relax_s = kHbarMeVSeconds / gamma_down_mev;
  rep.tau_process_s = kHbarMeVSeconds / (gamma_cn_kev * 1e-3);
  const double ln_n = log_bethe_level_density(ld.a, ld.excitation) + std::log(gamma_down_mev);
  rep.log2_n_eff = ln_n / std::numbers::ln2;
  rep.n_eff = std::exp(ln_n);
  rep.qubit_equiv = std::isfinite(rep.n_eff) && rep.n_eff > 0.0 ? qubit_equivalent(rep.n_eff)
                                                                 : static_cast<int>(std::ceil(rep.log2_n_eff));
  return rep;
}

// ---------------------------------------------------------------------------
// Synthetic data

void SynthesisParams::validate() const {
  if (!(temperature > 0.0)) throw ValidationError("synth: temperature must be > 0");
  if (!(direct_fraction >= 0.0 && direct_fraction < 1.0)) throw ValidationError("synth: direct fraction must be in [0, 1)");
  if (!(e_min > 0.0)) throw ValidationError("synth: e_min must be > 0");
  if (!(e_step > 0.0)) throw ValidationError("synth: e_step must be > 0");
  if (!(endpoint > e_min)) throw ValidationError("synth: endpoint must exceed e_min");
  if (!(noise >= 0.0)) throw ValidationError("synth: noise must be >= 0");
  if (!(normalization > 0.0)) throw ValidationError("synth: normalization must be > 0");
  if (angles.empty()) throw ValidationError("synth: at least one angle required");
  for (double a : angles)
    if (!(a > 0.0 && a < 180.0)) throw ValidationError("synth: angles must lie in (0, 180)");
  channel.validate();
}

SyntheticData synthesize_spectrum(const SynthesisParams& prm) {
  prm.validate();
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double e = prm.e_min + static_cast<double>(k) * prm.e_step;
    if (e > prm.endpoint * (1.0 + 1e-12)) break;
    grid.push_back(e);
  }
  const EnergyWindow win = prm.angular_window ? *prm.angular_window : EnergyWindow{grid.front(), grid.back()};

  SyntheticData out;
  out.angular.label = prm.label;
  out.angular.e_min_mev = win.lo;
  out.angular.e_max_mev = win.hi;
  for (std::size_t ia = 0; ia < prm.angles.size(); ++ia) {
    std::mt19937_64 rng(splitmix64(prm.seed ^ splitmix64(ia + 1)));
    const double theta = prm.angles[ia];
    const double shape = 1.0 + prm.direct_fraction * std::cos(theta * std::numbers::pi / 180.0);
    ParticleSpectrum sp;
    sp.angle_deg = theta;
    sp.beam_mev = prm.beam_mev;
    sp.z_projectile = prm.channel.z_projectile;
    sp.z_target = prm.channel.z_target;
    sp.a_target = prm.channel.a_target;
    sp.label = prm.label;
    double sum = 0.0, var = 0.0;
    for (double e : grid) {
      const double truth =
          prm.normalization * e * coulomb_penetrability(e, prm.channel) * std::exp(-e / prm.temperature) * shape;
      const double noisy = std::max(0.0, truth * (1.0 + prm.noise * standard_normal(rng)));
      const double err = prm.noise * truth;
      sp.energy.push_back(e);
      sp.yield.push_back(noisy);
      sp.yield_err.push_back(err);
      if (e >= win.lo && e <= win.hi) {
        sum += noisy * prm.e_step;
        var += err * err * prm.e_step * prm.e_step;
      }
    }
    out.angular.theta_deg.push_back(theta);
    out.angular.dsdo.push_back(sum);
    out.angular.err.push_back(std::sqrt(var));
    out.spectra.push_back(std::move(sp));
  }
  return out;
}

AngularDistribution synthesize_angular(const std::vector<double>& coefficients, const std::vector<double>& angles,
                                       double noise, std::uint64_t seed) {
  if (!(noise >= 0.0)) throw ValidationError("synth: noise must be >= 0");
  std::mt19937_64 rng(splitmix64(seed));
  AngularDistribution d;
  d.label = "synthetic";
  for (double theta : angles) {
    const double truth = legendre_series(coefficients, std::cos(theta * std::numbers::pi / 180.0));
    const double sd = noise * std::abs(truth);
    d.theta_deg.push_back(theta);
    d.dsdo.push_back(std::max(0.0, truth + sd * standard_normal(rng)));
    d.err.push_back(sd);
  }
  d.validate();
  return d;
}

}  // namespace phasemem::reaction
