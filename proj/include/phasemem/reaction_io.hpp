// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

// CSV carriers for reaction data.
//
// Spectrum file:
//   # angle_deg: 30
//   # beam_MeV: 18
//   # Zp: 1
//   # Zt: 78
//   # At: 195
//   # reaction: Pt(p,p')
//   E_MeV,yield,yield_err
//   1.25,3.1e-4,1.6e-5
//
// Angular file:
//   # e_min_MeV: 1
//   # e_max_MeV: 12
//   # reaction: Pt(p,p')
//   theta_deg,dsdo_mb_sr,err
//
// angle_deg, Zp, Zt and At are required in spectrum files; every other
// metadata key is optional.  Unknown keys are ignored.

#pragma once

#include "phasemem/reaction.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

namespace phasemem::io {

inline constexpr std::string_view kSpectrumHeader = "E_MeV,yield,yield_err";
inline constexpr std::string_view kAngularHeader = "theta_deg,dsdo_mb_sr,err";

using Dataset = std::variant<reaction::ParticleSpectrum, reaction::AngularDistribution>;

/// Parse either schema, chosen by the column header.  `source` prefixes
/// error messages ("source:line: ...").  Throws ValidationError.
Dataset parse_dataset(std::string_view text, std::string_view source = "<input>");
reaction::ParticleSpectrum parse_spectrum(std::string_view text, std::string_view source = "<input>");
reaction::AngularDistribution parse_angular(std::string_view text, std::string_view source = "<input>");

Dataset ingest(const std::filesystem::path& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

void write_spectrum_csv(std::ostream& os, const reaction::ParticleSpectrum& spectrum);
void write_angular_csv(std::ostream& os, const reaction::AngularDistribution& dist);
void write_spectrum_csv(const std::filesystem::path& path, const reaction::ParticleSpectrum& spectrum);
void write_angular_csv(const std::filesystem::path& path, const reaction::AngularDistribution& dist);

std::string read_file(const std::filesystem::path& path);  // throws ValidationError

}  // namespace phasemem::io
