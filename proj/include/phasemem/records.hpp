// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file records.hpp
 * @brief Result records with provenance, and their JSON / CSV emission.
 *
 * emit() writes one file per record kind (`<kind>.json` or `<kind>.csv`)
 * plus `manifest.json`.  Payload files never contain wall-clock data; the
 * creation time goes to `manifest.meta.json`.
 *
 * CSV columns per kind (first line of each file):
 *   scan             j_over_delta0,realizations,gamma_mean,gamma_sd,pr_mean,pr_sd,r_mean,r_sd,zero_gaps
 *   realization      j_over_delta0,realization,gamma_mean,pr_mean,r_mean,zero_gaps
 *   mixing           realization,eigen_index,eigenvalue,register_index,E_i,W_i
 *   ldos             realization,register_index,register_energy,eigen_index,lambda_k,weight
 *   scaled_spectrum  label,angle_deg,E_MeV,I,I_err
 *   temperature_fit  label,angle_deg,T_MeV,T_err,slope,intercept,chi2_dof,points,E_lo,E_hi,unit_weights
 *   legendre_fit     label,k,a_k,a_k_err,chi2_dof,dof,unit_weights
 *   asymmetry        label,a1_over_a0,a1_over_a0_err,significance,forward_backward,forward_backward_err,memory_retained,proxy,proxy_label
 *   timescale        gamma_down_MeV,gamma_cn_keV,time_ratio,tau_relax_s,tau_process_s,log2_n_eff,n_eff,qubit_equiv,a,U
 *   synth            file,kind,angle_deg,sha256
 */

#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace phasemem::records {

using json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);  // throws std::runtime_error

struct Provenance {
  std::string config_hash;
  std::map<std::string, std::string> inputs;  ///< input path -> sha256
  std::uint64_t seed = 0;
};

/// Flat rows for CSV output; every record of one kind shares `columns`.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct ResultRecord {
  std::string kind;
  Provenance provenance;
  std::string tool_version = PHASEMEM_VERSION;
  json payload;
  Table table;

  [[nodiscard]] json to_json() const;  ///< kind, provenance, tool_version, payload
  [[nodiscard]] std::vector<std::string> problems() const;  ///< empty when valid
};

enum class Format { Json, Csv };

/// Write records to `dir` (created if missing).  Returns the files written.
/// Throws std::runtime_error naming the path on I/O failure.
std::vector<std::filesystem::path> emit(const std::vector<ResultRecord>& records, const std::filesystem::path& dir,
                                        Format format);

/// CSV text for records of a single kind, header first.
std::string to_csv(const std::vector<const ResultRecord*>& records);

/// Re-hash every input named in the provenance; returns one message per
/// mismatch or unreadable file.
std::vector<std::string> verify_inputs(const ResultRecord& record);

/// Appends one JSON line per record and flushes, for partial results.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const ResultRecord& record);
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace phasemem::records
