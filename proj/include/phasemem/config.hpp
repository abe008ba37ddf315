// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file config.hpp
 * @brief Run configuration: a sectioned key = value file.
 *
 * Grammar: `[section]` headers, `key = value` lines, comments start with `;`
 * or `#`.  Lists are comma separated.  Relative paths resolve against the
 * directory holding the config file.
 *
 *   [run]       mode (simulate|scan|analyze|synth|report), seed, workers, out, format (json|csv)
 *   [model]     n, delta0, delta, j_over_delta0, topology, coupling, max_qubits
 *   [mixing]    window, width_method, bin_width, smoothing_bins, tail_cutoff
 *   [simulate]  realizations, profiles, dump_spectra
 *   [scan]      grid, realizations
 *   [reaction]  spectra, angular, r0, fit_lo, fit_hi, legendre_order,
 *               gamma_down_MeV, gamma_cn_keV, mass_number, beam_MeV,
 *               separation_MeV, emission_MeV, level_a, excitation_MeV
 *   [synth]     temperature, endpoint, e_min, e_step, direct_fraction, angles,
 *               noise, normalization, beam_MeV, Zp, Zt, At, r0, window_lo,
 *               window_hi, label
 *
 * `[model] n` is required for simulate and scan, `[scan] grid` for scan, and
 * at least one of `[reaction] spectra` / `angular` for analyze.
 */

#pragma once

#include "phasemem/mixing.hpp"
#include "phasemem/model.hpp"
#include "phasemem/reaction.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phasemem {

enum class Mode { Simulate, Scan, Analyze, Synth, Report };
enum class OutputFormat { Json, Csv };

std::string_view to_string(Mode m) noexcept;
std::string_view to_string(OutputFormat f) noexcept;
Mode parse_mode(std::string_view s);               // throws ValidationError
OutputFormat parse_format(std::string_view s);     // throws ValidationError

struct MixingBlock {
  double window_fraction = 0.25;
  WidthOptions width;
};

struct SimulateBlock {
  std::size_t realizations = 1;
  std::size_t profiles = 1;   ///< mid-spectrum eigenstates / register states exported from realization 0
  bool dump_spectra = false;  ///< binary spectrum dump per realization
};

struct ScanBlock {
  std::vector<double> grid;
  std::size_t realizations = 10;
};

struct ReactionBlock {
  std::vector<std::filesystem::path> spectra;
  std::vector<std::filesystem::path> angular;
  double r0 = reaction::kDefaultRadius;
  std::optional<reaction::EnergyWindow> fit_window;
  int legendre_order = 2;
  double gamma_down_mev = 1.0;
  double gamma_cn_kev = 0.02;
  double mass_number = 196.0;  ///< compound nucleus A for the level density
  double beam_mev = 18.0;
  double separation_mev = 5.7;
  double emission_mev = 0.0;
  std::optional<double> level_a;         ///< overrides A/8
  std::optional<double> excitation_mev;  ///< overrides beam + separation - emission

  [[nodiscard]] reaction::LevelDensityParams level_density() const;
};

struct RunConfig {
  Mode mode = Mode::Simulate;
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path out = "out";
  OutputFormat format = OutputFormat::Json;
  ModelConfig model;
  double j_over_delta0 = 0.0;
  MixingBlock mixing;
  SimulateBlock simulate;
  ScanBlock scan;
  ReactionBlock reaction;
  reaction::SynthesisParams synth;

  /// Every violated invariant, one message per field.
  [[nodiscard]] std::vector<std::string> validate() const;
  /// Model config with the run seed and J = j_over_delta0 * delta0 applied.
  [[nodiscard]] ModelConfig effective_model() const;
};

struct ConfigResult {
  std::optional<RunConfig> config;  ///< set only when errors is empty
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  [[nodiscard]] bool ok() const noexcept { return config.has_value(); }
};

/// Parse and validate.  `mode` replaces [run] mode when given (CLI subcommand).
ConfigResult parse_config(std::string_view text, const std::filesystem::path& base_dir = ".",
                          std::optional<Mode> mode = std::nullopt);
ConfigResult load_config(const std::filesystem::path& path, std::optional<Mode> mode = std::nullopt);

/// Canonical JSON text of every field that affects results (not workers,
/// out or format).  Its SHA-256 is the config hash.
std::string canonical_config(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace phasemem
