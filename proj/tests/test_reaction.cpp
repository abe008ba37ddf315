// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "phasemem/error.hpp"
#include "phasemem/reaction.hpp"

#include <cmath>
#include <numbers>

using namespace phasemem;
using namespace phasemem::reaction;

namespace {

const Channel kPt{1, 78, 195.0};

ParticleSpectrum exponential_spectrum(double t, const Channel& ch) {
  ParticleSpectrum s;
  s.angle_deg = 90.0;
  s.z_projectile = ch.z_projectile;
  s.z_target = ch.z_target;
  s.a_target = ch.a_target;
  for (double e = 2.0; e <= 14.0; e += 0.5) {
    s.energy.push_back(e);
    s.yield.push_back(3.0 * e * coulomb_penetrability(e, ch) * std::exp(-e / t));
    s.yield_err.push_back(0.0);
  }
  return s;
}

AngularDistribution series(const std::vector<double>& a, double hi = 165.0) {
  AngularDistribution d;
  for (double th = 15.0; th <= hi; th += 10.0) {
    d.theta_deg.push_back(th);
    d.dsdo.push_back(legendre_series(a, std::cos(th * std::numbers::pi / 180.0)));
    d.err.push_back(0.01);
  }
  return d;
}

}  // namespace

TEST_CASE("penetrability matches numerical WKB quadrature") {
  for (const Channel ch : {kPt, Channel{1, 26, 56.0}, Channel{2, 50, 118.0, 1.3, 4.001506}}) {
    for (double frac : {0.2, 0.4, 0.6, 0.8, 0.95}) {
      const double e = frac * ch.barrier();
      const double ref = oracle::penetrability_quadrature(e, ch.z_projectile, ch.z_target, ch.a_target, ch.r0,
                                                          ch.projectile_mass_u);
      CHECK(coulomb_penetrability(e, ch) == doctest::Approx(ref).epsilon(1e-6));
    }
  }
}

TEST_CASE("penetrability is 1 above the barrier, monotone and continuous") {
  const double b = kPt.barrier();
  CHECK(b == doctest::Approx(78 * kCoulombE2 / (1.4 * std::cbrt(195.0))));
  CHECK(coulomb_penetrability(b * 1.01, kPt) == 1.0);
  CHECK(coulomb_penetrability(b, kPt) == 1.0);
  CHECK(std::abs(coulomb_penetrability(b * (1 - 1e-12), kPt) - 1.0) <= 1e-6);
  double prev = 0.0;
  for (double e = 0.5; e < b; e += 0.25) {
    const double p = coulomb_penetrability(e, kPt);
    CHECK(p > prev);
    CHECK(p <= 1.0);
    prev = p;
  }
  CHECK_THROWS_AS(coulomb_penetrability(-1.0, kPt), ValidationError);
  CHECK_THROWS_AS((Channel{1, 78, 0.0}.validate()), ValidationError);
}

TEST_CASE("scaling divides by E * P and reports missing metadata") {
  auto s = exponential_spectrum(0.7, kPt);
  const auto scaled = scale_spectrum(s);
  REQUIRE(scaled.energy.size() == s.energy.size());
  for (std::size_t i = 0; i < s.energy.size(); ++i)
    CHECK(scaled.intensity[i] == doctest::Approx(3.0 * std::exp(-s.energy[i] / 0.7)).epsilon(1e-12));
  CHECK(scaled.model == "s-wave-wkb");

  s.z_target.reset();
  s.a_target.reset();
  try {
    (void)scale_spectrum(s);
    FAIL("no exception");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("Zt") != std::string::npos);
    CHECK(msg.find("At") != std::string::npos);
  }
}

TEST_CASE("deep sub-barrier samples are dropped, not divided by zero") {
  ParticleSpectrum s;
  s.z_projectile = 1;
  s.z_target = 92;
  s.a_target = 238.0;
  s.energy = {1e-6, 0.5, 8.0};
  s.yield = {1.0, 1.0, 1.0};
  s.yield_err = {0.0, 0.0, 0.0};
  const auto scaled = scale_spectrum(s);
  CHECK(scaled.dropped == 1);
  CHECK(scaled.energy.front() == 0.5);
}

TEST_CASE("exact exponential gives T exactly") {
  const auto scaled = scale_spectrum(exponential_spectrum(0.7, kPt));
  const auto fit = fit_temperature(scaled);
  CHECK(fit.temperature == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(fit.unit_weights);
  CHECK(fit.points >= 3);
  const auto w = fit_temperature(scaled, EnergyWindow{6.0, 12.0});
  CHECK(w.temperature == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(w.window.lo == 6.0);
}

TEST_CASE("temperature fit failures") {
  ScaledSpectrum flat;
  for (double e = 1.0; e < 6.0; e += 0.5) {
    flat.energy.push_back(e);
    flat.intensity.push_back(2.0);
    flat.intensity_err.push_back(0.1);
  }
  CHECK_THROWS_AS(fit_temperature(flat), FitError);
  try {
    (void)fit_temperature(flat);
  } catch (const FitError& e) {
    CHECK(std::string(e.what()).find("evaporation") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_temperature(flat, EnergyWindow{1.0, 1.5}), FitError);
}

TEST_CASE("Legendre fit: isotropic and pure P1") {
  const auto iso = fit_legendre(series({2.5}));
  CHECK(iso.coefficients[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(std::abs(iso.coefficients[1]) <= 1e-10);
  CHECK(std::abs(iso.coefficients[2]) <= 1e-10);
  const auto rep = asymmetry_report(iso);
  CHECK(std::abs(rep.ratio) <= 1e-10);
  CHECK(rep.forward_backward == doctest::Approx(1.0));

  // Forward hemisphere only: P1 is negative beyond 90 degrees.
  const auto p1 = fit_legendre(series({0.0, 1.0}, 85.0));
  CHECK(std::abs(p1.coefficients[0]) <= 1e-10);
  CHECK(p1.coefficients[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(p1.coefficients[2]) <= 1e-10);
}

TEST_CASE("Legendre fit agrees with the normal-equations oracle") {
  const auto d = synthesize_angular({1.0, 0.3, 0.1}, {20, 35, 50, 65, 80, 95, 110, 125, 140, 155, 170}, 0.03, 5);
  const auto fit = fit_legendre(d, 2);
  const auto ref = oracle::legendre_normal_equations(d.theta_deg, d.dsdo, d.err, 2);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(fit.coefficients[k] == doctest::Approx(ref.coef[k]).epsilon(1e-10));
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(fit.covariance(k, j) - ref.cov(k, j)) <= 1e-10 * std::abs(ref.cov(k, k)));
    CHECK(std::abs(fit.coefficients[k] - std::vector<double>{1.0, 0.3, 0.1}[k]) <= 3.0 * std::sqrt(fit.covariance(k, k)));
  }
  CHECK(fit.dof == 8);
  CHECK_FALSE(fit.unit_weights);
}

TEST_CASE("order 0 is the weighted mean") {
  AngularDistribution d;
  d.theta_deg = {30, 60, 90, 120};
  d.dsdo = {1.0, 2.0, 3.0, 5.0};
  d.err = {0.5, 1.0, 1.0, 2.0};
  double sw = 0, swy = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double w = 1.0 / (d.err[i] * d.err[i]);
    sw += w;
    swy += w * d.dsdo[i];
  }
  const auto fit = fit_legendre(d, 0);
  CHECK(fit.coefficients[0] == doctest::Approx(swy / sw).epsilon(1e-12));
  CHECK(fit.covariance(0, 0) == doctest::Approx(1.0 / sw).epsilon(1e-12));
}

TEST_CASE("Legendre fit failures") {
  AngularDistribution d;
  d.theta_deg = {30, 90};
  d.dsdo = {1.0, 1.0};
  d.err = {0.1, 0.1};
  CHECK_THROWS_AS(fit_legendre(d, 2), FitError);
  LegendreFit neg;
  neg.coefficients = {-1.0, 0.2, 0.0};
  neg.covariance = DenseMatrix(3, 3);
  CHECK_THROWS_AS(asymmetry_report(neg), FitError);
}

TEST_CASE("forward/backward ratio and proxy") {
  LegendreFit f;
  f.coefficients = {1.0, 0.5, 0.0};
  f.covariance = DenseMatrix(3, 3);
  const auto rep = asymmetry_report(f);
  CHECK(rep.forward_backward == doctest::Approx(3.0));
  CHECK(rep.ratio == doctest::Approx(0.5));
  CHECK(rep.memory_retained);

  f.coefficients = {1.0, 0.4, 0.05};
  const auto p = phase_time_proxy(f);
  CHECK(p.value == doctest::Approx(0.4));
  CHECK(p.label.find("model-dependent") != std::string::npos);
  f.coefficients = {2.0, 0.0, 0.1};
  CHECK(phase_time_proxy(f).value == 0.0);
  CHECK_FALSE(asymmetry_report(f).memory_retained);
}

TEST_CASE("proxy is independent of normalization") {
  SynthesisParams p;
  p.direct_fraction = 0.3;
  p.noise = 0.0;
  p.angles = {20, 40, 60, 80, 100, 120, 140, 160};
  const auto a = synthesize_spectrum(p);
  p.normalization = 40.0;
  const auto b = synthesize_spectrum(p);
  CHECK(phase_time_proxy(fit_legendre(a.angular)).value ==
        doctest::Approx(phase_time_proxy(fit_legendre(b.angular)).value).epsilon(1e-12));
}

TEST_CASE("scaling covariance under a constant factor") {
  SynthesisParams p;
  p.direct_fraction = 0.2;
  p.noise = 0.03;
  p.seed = 17;
  p.angles = {20, 40, 60, 80, 100, 120, 140, 160};
  const auto a = synthesize_spectrum(p);
  p.normalization = 7.0;
  const auto b = synthesize_spectrum(p);

  const auto sa = scale_spectrum(a.spectra[0]), sb = scale_spectrum(b.spectra[0]);
  for (std::size_t i = 0; i < sa.energy.size(); ++i)
    CHECK(sb.intensity[i] == doctest::Approx(7.0 * sa.intensity[i]).epsilon(1e-12));
  CHECK(fit_temperature(sa).temperature == doctest::Approx(fit_temperature(sb).temperature).epsilon(1e-10));

  const auto fa = fit_legendre(a.angular), fb = fit_legendre(b.angular);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(fb.coefficients[k] == doctest::Approx(7.0 * fa.coefficients[k]).epsilon(1e-10));
  const auto ra = asymmetry_report(fa), rb = asymmetry_report(fb);
  CHECK(ra.ratio == doctest::Approx(rb.ratio).epsilon(1e-10));
  CHECK(ra.forward_backward == doctest::Approx(rb.forward_backward).epsilon(1e-10));
}

TEST_CASE("synthetic data: f = 0 is isotropic, f = 0.3 is recovered") {
  SynthesisParams p;
  p.angles = {15, 30, 45, 60, 75, 90, 105, 120, 135, 150, 165};
  p.noise = 0.02;
  p.seed = 3;
  const auto iso = synthesize_spectrum(p);
  const auto fi = fit_legendre(iso.angular);
  CHECK(std::abs(fi.coefficients[1]) <= 3.0 * std::sqrt(fi.covariance(1, 1)));

  p.direct_fraction = 0.3;
  const auto fwd = synthesize_spectrum(p);
  const auto rep = asymmetry_report(fit_legendre(fwd.angular));
  CHECK(std::abs(rep.ratio - 0.3) <= 3.0 * rep.ratio_err);
  CHECK(rep.significance > 3.0);

  const auto t = fit_temperature(scale_spectrum(fwd.spectra[0]));
  CHECK(t.temperature == doctest::Approx(0.7).epsilon(0.05).scale(0));
}

TEST_CASE("synthesis parameter validation") {
  SynthesisParams p;
  p.temperature = 0.0;
  CHECK_THROWS_AS(synthesize_spectrum(p), ValidationError);
  p.temperature = 0.7;
  p.direct_fraction = 1.0;
  CHECK_THROWS_AS(synthesize_spectrum(p), ValidationError);
}

TEST_CASE("time-scale arithmetic") {
  const auto rep = timescale_report(1.0, 0.02, {24.5, 23.7});
  CHECK(rep.time_ratio == 5e4);
  CHECK(rep.tau_relax_s == doctest::Approx(6.582119569e-22));
  CHECK(rep.tau_process_s / rep.tau_relax_s == doctest::Approx(5e4));
  CHECK(timescale_report(0.5, 0.01, {24.5, 23.7}).time_ratio == doctest::Approx(5e4).epsilon(1e-15));
  CHECK_THROWS_AS(timescale_report(0.0, 0.02, {24.5, 23.7}), ValidationError);
  CHECK_THROWS_AS(timescale_report(1.0, -1.0, {24.5, 23.7}), ValidationError);
}

TEST_CASE("qubit equivalents") {
  CHECK(qubit_equivalent(1e20) == 67);
  CHECK(qubit_equivalent(1e9) == 30);
  CHECK(qubit_equivalent(1024.0) == 10);
  CHECK(qubit_equivalent(1025.0) == 11);
  CHECK(qubit_equivalent(1.0) == 0);
}

TEST_CASE("Bethe level density") {
  const double a = 20.0, u = 10.0;
  const double ref = std::sqrt(std::numbers::pi) / 12.0 * std::exp(2.0 * std::sqrt(a * u)) /
                     (std::pow(a, 0.25) * std::pow(u, 1.25));
  CHECK(bethe_level_density(a, u) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(log_bethe_level_density(a, u) == doctest::Approx(std::log(ref)).epsilon(1e-12));
  CHECK_THROWS_AS(bethe_level_density(0.0, u), ValidationError);
  CHECK_THROWS_AS(bethe_level_density(a, 0.0), ValidationError);

  const auto rep = timescale_report(1.0, 0.02, {a, u});
  CHECK(rep.log2_n_eff == doctest::Approx(std::log2(ref)).epsilon(1e-12));
  CHECK(rep.qubit_equiv == qubit_equivalent(ref));

  const auto ld = default_level_density(196.0, 18.0, 5.7);
  CHECK(ld.a == 24.5);
  CHECK(ld.excitation == doctest::Approx(23.7));
}
