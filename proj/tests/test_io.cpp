// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phasemem/error.hpp"
#include "phasemem/reaction_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace phasemem;
namespace fs = std::filesystem;

namespace {

const char* kSpectrum =
    "# angle_deg: 30\n"
    "# beam_MeV: 18\n"
    "# Zp: 1\n"
    "# Zt: 78\n"
    "# At: 195\n"
    "# reaction: Pt(p,p')\n"
    "E_MeV,yield,yield_err\n"
    "1.25,3.1e-4,1.6e-5\n"
    "1.5,4.0e-4,2.0e-5\n"
    "\n"
    "1.75,4.2e-4,2.1e-5\n";

std::string message_of(const std::string& text) {
  try {
    (void)io::parse_dataset(text, "f.csv");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("well-formed spectrum file") {
  const auto s = io::parse_spectrum(kSpectrum, "f.csv");
  CHECK(s.energy.size() == 3);
  CHECK(s.angle_deg == 30.0);
  CHECK(*s.z_target == 78);
  CHECK(*s.a_target == 195.0);
  CHECK(*s.beam_mev == 18.0);
  CHECK(s.label == "Pt(p,p')");
  CHECK(s.source_lines == std::vector<std::size_t>{8, 9, 11});
  CHECK(std::holds_alternative<reaction::ParticleSpectrum>(io::parse_dataset(kSpectrum)));
}

TEST_CASE("non-monotonic energies name the offending line") {
  std::string text = kSpectrum;
  text += "1.5,1e-4,1e-5\n";
  const auto msg = message_of(text);
  CHECK(msg.find("f.csv:12") != std::string::npos);
}

TEST_CASE("missing metadata keys are all reported") {
  const std::string text =
      "# angle_deg: 30\n"
      "E_MeV,yield,yield_err\n"
      "1.0,1.0,0.1\n";
  const auto msg = message_of(text);
  CHECK(msg.find("Zp") != std::string::npos);
  CHECK(msg.find("Zt") != std::string::npos);
  CHECK(msg.find("At") != std::string::npos);
}

TEST_CASE("malformed rows carry line numbers") {
  CHECK(message_of(std::string(kSpectrum) + "2.0,abc,0.1\n").find("f.csv:12") != std::string::npos);
  CHECK(message_of(std::string(kSpectrum) + "2.0,1.0\n").find("f.csv:12") != std::string::npos);
  CHECK(message_of(std::string(kSpectrum) + "2.0,-1.0,0.1\n").find("f.csv:12") != std::string::npos);
  CHECK(message_of("# e_min_MeV: 1\ntheta_deg,dsdo_mb_sr,err\n0,1,0.1\n").find("f.csv:3") != std::string::npos);
  CHECK_FALSE(message_of("no header here\n1,2,3\n").empty());
}

TEST_CASE("angular file with optional window") {
  const auto d = io::parse_angular("# e_min_MeV: 2\n# e_max_MeV: 9\ntheta_deg,dsdo_mb_sr,err\n30,1.2,0.1\n150,0.8,0.1\n");
  CHECK(d.theta_deg.size() == 2);
  CHECK(*d.e_min_mev == 2.0);
  CHECK(*d.e_max_mev == 9.0);
  CHECK_FALSE(io::parse_angular("theta_deg,dsdo_mb_sr,err\n90,1,0\n").e_min_mev);
}

TEST_CASE("format_double reads back exactly") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -0.0, 12.0}) {
    const auto s = io::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("generated data round-trips loss-free") {
  reaction::SynthesisParams p;
  p.direct_fraction = 0.3;
  p.seed = 11;
  const auto data = reaction::synthesize_spectrum(p);
  const auto dir = fs::temp_directory_path() / "phasemem_io_roundtrip";
  fs::create_directories(dir);

  for (const auto& sp : data.spectra) {
    const auto path = dir / "s.csv";
    io::write_spectrum_csv(path, sp);
    const auto back = std::get<reaction::ParticleSpectrum>(io::ingest(path));
    CHECK(back.energy == sp.energy);
    CHECK(back.yield == sp.yield);
    CHECK(back.yield_err == sp.yield_err);
    CHECK(back.angle_deg == sp.angle_deg);
    CHECK(back.z_projectile == sp.z_projectile);
    CHECK(back.z_target == sp.z_target);
    CHECK(back.a_target == sp.a_target);
    CHECK(back.beam_mev == sp.beam_mev);
    CHECK(back.label == sp.label);
  }
  const auto path = dir / "a.csv";
  io::write_angular_csv(path, data.angular);
  const auto back = std::get<reaction::AngularDistribution>(io::ingest(path));
  CHECK(back.theta_deg == data.angular.theta_deg);
  CHECK(back.dsdo == data.angular.dsdo);
  CHECK(back.err == data.angular.err);
  CHECK(back.e_min_mev == data.angular.e_min_mev);
  CHECK(back.e_max_mev == data.angular.e_max_mev);

  std::ostringstream a, b;
  io::write_angular_csv(a, data.angular);
  io::write_angular_csv(b, back);
  CHECK(a.str() == b.str());
  fs::remove_all(dir);
}

TEST_CASE("ingest of a missing file") {
  CHECK_THROWS_AS(io::ingest("/nonexistent/phasemem.csv"), ValidationError);
}
