// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "phasemem/config.hpp"
#include "phasemem/mixing.hpp"
#include "phasemem/reaction.hpp"
#include "phasemem/records.hpp"

#include <functional>
#include <vector>

namespace phasemem {

/// Called once per record, in final output order, as soon as the record and
/// all records before it are complete.
using RecordSink = std::function<void(const records::ResultRecord&)>;

/// Execute the configured mode.  Records come back ordered by (grid index,
/// realization index, item); payloads do not depend on `workers`.  synth
/// mode also writes its CSV data files into `config.out`.
/// Throws ValidationError on bad inputs, KernelError / FitError on failures.
std::vector<records::ResultRecord> run_ensemble(const RunConfig& config, const RecordSink& sink = {});

// Record builders, shared with the tests.
records::ResultRecord scan_record(const ScanPoint& point, const records::Provenance& prov);
records::ResultRecord mixing_record(const MixingProfile& profile, std::size_t realization, const records::Provenance& prov);
records::ResultRecord ldos_record(const StrengthFunction& strength, std::size_t realization,
                                  const records::Provenance& prov);
records::ResultRecord scaled_record(const reaction::ScaledSpectrum& scaled, const records::Provenance& prov);
records::ResultRecord temperature_record(const reaction::TemperatureFit& fit, const reaction::ScaledSpectrum& scaled,
                                         const records::Provenance& prov);
records::ResultRecord legendre_record(const reaction::LegendreFit& fit, const std::string& label,
                                      const records::Provenance& prov);
records::ResultRecord asymmetry_record(const reaction::LegendreFit& fit, const std::string& label,
                                       const records::Provenance& prov);
records::ResultRecord timescale_record(const reaction::TimescaleReport& report, const records::Provenance& prov);

}  // namespace phasemem
