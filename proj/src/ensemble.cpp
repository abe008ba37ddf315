// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/ensemble.hpp"

#include "phasemem/error.hpp"
#include "phasemem/reaction_io.hpp"
#include "phasemem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>

namespace phasemem {

using records::json;
using records::Provenance;
using records::ResultRecord;

namespace {

json array_of(const std::vector<double>& v) { return json(v); }

ResultRecord make(std::string kind, const Provenance& prov, json payload, std::vector<std::string> columns) {
  ResultRecord r;
  r.kind = std::move(kind);
  r.provenance = prov;
  r.payload = std::move(payload);
  r.table.columns = std::move(columns);
  return r;
}

ConfigHash hash_bytes(const std::string& hex) {
  ConfigHash h{};
  for (std::size_t i = 0; i < h.size() && 2 * i + 1 < hex.size(); ++i)
    h[i] = static_cast<std::uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
  return h;
}

// Hands records to the sink in index order as contiguous prefixes complete.
class OrderedFlush {
 public:
  OrderedFlush(std::size_t slots, const RecordSink& sink) : done_(slots), items_(slots), sink_(sink) {}

  void complete(std::size_t slot, std::vector<ResultRecord> recs) {
#pragma omp critical(phasemem_flush)
    {
      items_[slot] = std::move(recs);
      done_[slot] = true;
      while (next_ < done_.size() && done_[next_]) {
        if (sink_)
          for (const auto& r : items_[next_]) sink_(r);
        ++next_;
      }
    }
  }

  std::vector<ResultRecord> take() {
    std::vector<ResultRecord> all;
    for (std::size_t i = 0; i < next_; ++i)
      for (auto& r : items_[i]) all.push_back(std::move(r));
    return all;
  }

 private:
  std::vector<bool> done_;
  std::vector<std::vector<ResultRecord>> items_;
  std::size_t next_ = 0;
  const RecordSink& sink_;
};

std::vector<ResultRecord> run_simulate(const RunConfig& cfg, const Provenance& prov, const RecordSink& sink) {
  const ModelConfig model = cfg.effective_model();
  const std::size_t R = cfg.simulate.realizations;
  const kernels::Exec inner = cfg.workers > 1 ? kernels::Exec::Serial : kernels::Exec::Parallel;
  OrderedFlush flush(R, sink);
  std::vector<std::string> failures(R);

#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (std::ptrdiff_t sr = 0; sr < static_cast<std::ptrdiff_t>(R); ++sr) {
    const auto r = static_cast<std::size_t>(sr);
    std::vector<ResultRecord> out;
    try {
      const CouplingDraw draw = draw_couplings(model, r);
      const HamiltonianMatrix h = build_hamiltonian(draw, model);
      const RegisterBasis basis = register_basis(draw, model.n, model.coupling_op);
      DiagonalizeOptions dopt;
      dopt.exec = inner;
      const Spectrum spectrum = diagonalize(h, dopt);
      if (cfg.simulate.dump_spectra)
        write_spectrum(cfg.out / ("spectrum_r" + std::to_string(r) + ".bin"), spectrum, hash_bytes(prov.config_hash));
      const RealizationStats st = realization_stats(spectrum, basis, cfg.mixing.window_fraction, cfg.mixing.width);
      out.push_back(make("realization", prov,
                         {{"j_over_delta0", cfg.j_over_delta0},
                          {"realization", r},
                          {"n", model.n},
                          {"window", cfg.mixing.window_fraction},
                          {"width_method", to_string(cfg.mixing.width.method)},
                          {"gamma_mean", st.gamma_mean},
                          {"pr_mean", st.pr_mean},
                          {"r_mean", st.r_mean},
                          {"zero_gaps", st.zero_gaps}},
                         {"j_over_delta0", "realization", "gamma_mean", "pr_mean", "r_mean", "zero_gaps"}));
      out.back().table.rows.push_back({cfg.j_over_delta0, r, st.gamma_mean, st.pr_mean, st.r_mean, st.zero_gaps});

      if (r == 0) {
        const std::size_t n = spectrum.dim();
        const std::size_t p = std::min(cfg.simulate.profiles, n);
        const std::size_t first = n / 2 - std::min(n / 2, p / 2);
        for (std::size_t j = 0; j < p; ++j) {
          const auto prof = mixing_weights(spectrum, basis, first + j);
          out.push_back(mixing_record(prof, r, prov));
          out.back().payload["gamma_down"] = spreading_width(prof, cfg.mixing.width).gamma_down;
          out.back().payload["participation_ratio"] = participation_ratio(prof);
        }
        for (std::size_t j = 0; j < p; ++j) {
          const auto lf = ldos(spectrum, basis, basis.by_energy[first + j]);
          out.push_back(ldos_record(lf, r, prov));
          out.back().payload["gamma_down"] = spreading_width(lf, cfg.mixing.width).gamma_down;
          out.back().payload["participation_ratio"] = participation_ratio(lf);
        }
      }
    } catch (const std::exception& ex) {
      failures[r] = ex.what();
      out.clear();
    }
    flush.complete(r, std::move(out));
  }
  for (std::size_t r = 0; r < R; ++r)
    if (!failures[r].empty())
      throw KernelError("J/Delta0 = " + io::format_double(cfg.j_over_delta0) + ", realization " + std::to_string(r) +
                        ": " + failures[r]);
  return flush.take();
}

std::vector<ResultRecord> run_scan(const RunConfig& cfg, const Provenance& prov, const RecordSink& sink) {
  ScanOptions opt;
  opt.grid = cfg.scan.grid;
  opt.realizations = cfg.scan.realizations;
  opt.window_fraction = cfg.mixing.window_fraction;
  opt.width = cfg.mixing.width;
  opt.workers = cfg.workers;
  std::vector<ResultRecord> out;
  opt.on_point = [&](std::size_t, const ScanPoint& pt) {
    out.push_back(scan_record(pt, prov));
    out.back().payload["n"] = cfg.model.n;
    out.back().payload["window"] = cfg.mixing.window_fraction;
    out.back().payload["width_method"] = to_string(cfg.mixing.width.method);
    if (sink) sink(out.back());
  };
  chaos_scan(cfg.effective_model(), opt);
  return out;
}

std::string stem_label(const std::string& label, const std::filesystem::path& path) {
  return label.empty() ? path.stem().string() : label;
}

std::vector<ResultRecord> run_analyze(const RunConfig& cfg, const Provenance& prov, const RecordSink& sink) {
  std::vector<ResultRecord> out;
  auto push = [&](ResultRecord r) {
    if (sink) sink(r);
    out.push_back(std::move(r));
  };
  for (const auto& path : cfg.reaction.spectra) {
    auto data = io::ingest(path);
    auto* spec = std::get_if<reaction::ParticleSpectrum>(&data);
    if (!spec) throw ValidationError(path.string() + ": listed under reaction.spectra but holds an angular distribution");
    spec->label = stem_label(spec->label, path);
    const auto scaled = reaction::scale_spectrum(*spec, cfg.reaction.r0);
    const auto fit = reaction::fit_temperature(scaled, cfg.reaction.fit_window);
    push(scaled_record(scaled, prov));
    push(temperature_record(fit, scaled, prov));
  }
  for (const auto& path : cfg.reaction.angular) {
    auto data = io::ingest(path);
    auto* dist = std::get_if<reaction::AngularDistribution>(&data);
    if (!dist) throw ValidationError(path.string() + ": listed under reaction.angular but holds a particle spectrum");
    const std::string label = stem_label(dist->label, path);
    const auto fit = reaction::fit_legendre(*dist, cfg.reaction.legendre_order);
    push(legendre_record(fit, label, prov));
    push(asymmetry_record(fit, label, prov));
  }
  push(timescale_record(
      reaction::timescale_report(cfg.reaction.gamma_down_mev, cfg.reaction.gamma_cn_kev, cfg.reaction.level_density()),
      prov));
  return out;
}

std::vector<ResultRecord> run_synth(const RunConfig& cfg, const Provenance& prov, const RecordSink& sink) {
  reaction::SynthesisParams params = cfg.synth;
  params.seed = cfg.seed;
  const auto data = reaction::synthesize_spectrum(params);
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cfg.out.string() + ": " + ec.message());

  std::vector<ResultRecord> out;
  auto add = [&](const std::string& file, const std::string& kind, std::optional<double> angle) {
    const std::string hash = records::sha256_file(cfg.out / file);
    ResultRecord r = make("synth", prov,
                          {{"file", file},
                           {"kind", kind},
                           {"angle_deg", angle ? json(*angle) : json(nullptr)},
                           {"sha256", hash},
                           {"temperature", params.temperature},
                           {"direct_fraction", params.direct_fraction},
                           {"noise", params.noise}},
                          {"file", "kind", "angle_deg", "sha256"});
    r.table.rows.push_back({file, kind, angle ? json(*angle) : json(nullptr), hash});
    if (sink) sink(r);
    out.push_back(std::move(r));
  };
  for (const auto& sp : data.spectra) {
    const std::string file = "synth_" + params.label + "_" + io::format_double(sp.angle_deg) + "deg.csv";
    io::write_spectrum_csv(cfg.out / file, sp);
    add(file, "spectrum", sp.angle_deg);
  }
  const std::string file = "synth_" + params.label + "_angular.csv";
  io::write_angular_csv(cfg.out / file, data.angular);
  add(file, "angular", std::nullopt);
  return out;
}

}  // namespace

ResultRecord scan_record(const ScanPoint& pt, const Provenance& prov) {
  ResultRecord r = make("scan", prov,
                        {{"j_over_delta0", pt.j_over_delta0},
                         {"realizations", pt.realizations},
                         {"gamma_mean", pt.gamma_mean},
                         {"gamma_sd", pt.gamma_sd},
                         {"pr_mean", pt.pr_mean},
                         {"pr_sd", pt.pr_sd},
                         {"r_mean", pt.r_mean},
                         {"r_sd", pt.r_sd},
                         {"zero_gaps", pt.zero_gaps}},
                        {"j_over_delta0", "realizations", "gamma_mean", "gamma_sd", "pr_mean", "pr_sd", "r_mean",
                         "r_sd", "zero_gaps"});
  r.table.rows.push_back({pt.j_over_delta0, pt.realizations, pt.gamma_mean, pt.gamma_sd, pt.pr_mean, pt.pr_sd,
                          pt.r_mean, pt.r_sd, pt.zero_gaps});
  return r;
}

ResultRecord mixing_record(const MixingProfile& p, std::size_t realization, const Provenance& prov) {
  ResultRecord r = make("mixing", prov,
                        {{"realization", realization},
                         {"eigen_index", p.eigen_index},
                         {"eigenvalue", p.eigenvalue},
                         {"E_i", array_of(p.energies)},
                         {"W_i", array_of(p.weights)}},
                        {"realization", "eigen_index", "eigenvalue", "register_index", "E_i", "W_i"});
  for (std::size_t i = 0; i < p.energies.size(); ++i)
    r.table.rows.push_back({realization, p.eigen_index, p.eigenvalue, i, p.energies[i], p.weights[i]});
  return r;
}

ResultRecord ldos_record(const StrengthFunction& s, std::size_t realization, const Provenance& prov) {
  ResultRecord r = make("ldos", prov,
                        {{"realization", realization},
                         {"register_index", s.register_index},
                         {"register_energy", s.register_energy},
                         {"lambda_k", array_of(s.energies)},
                         {"weight", array_of(s.weights)}},
                        {"realization", "register_index", "register_energy", "eigen_index", "lambda_k", "weight"});
  for (std::size_t k = 0; k < s.energies.size(); ++k)
    r.table.rows.push_back({realization, s.register_index, s.register_energy, k, s.energies[k], s.weights[k]});
  return r;
}

ResultRecord scaled_record(const reaction::ScaledSpectrum& s, const Provenance& prov) {
  ResultRecord r = make("scaled_spectrum", prov,
                        {{"label", s.label},
                         {"angle_deg", s.angle_deg},
                         {"r0", s.r0},
                         {"model", s.model},
                         {"dropped", s.dropped},
                         {"E_MeV", array_of(s.energy)},
                         {"I", array_of(s.intensity)},
                         {"I_err", array_of(s.intensity_err)}},
                        {"label", "angle_deg", "E_MeV", "I", "I_err"});
  for (std::size_t i = 0; i < s.energy.size(); ++i)
    r.table.rows.push_back({s.label, s.angle_deg, s.energy[i], s.intensity[i], s.intensity_err[i]});
  return r;
}

ResultRecord temperature_record(const reaction::TemperatureFit& f, const reaction::ScaledSpectrum& s,
                                const Provenance& prov) {
  ResultRecord r = make("temperature_fit", prov,
                        {{"label", s.label},
                         {"angle_deg", s.angle_deg},
                         {"T_MeV", f.temperature},
                         {"T_err", f.temperature_err},
                         {"slope", f.slope},
                         {"intercept", f.intercept},
                         {"chi2_dof", f.chi2_dof},
                         {"points", f.points},
                         {"window", {f.window.lo, f.window.hi}},
                         {"unit_weights", f.unit_weights}},
                        {"label", "angle_deg", "T_MeV", "T_err", "slope", "intercept", "chi2_dof", "points", "E_lo",
                         "E_hi", "unit_weights"});
  r.table.rows.push_back({s.label, s.angle_deg, f.temperature, f.temperature_err, f.slope, f.intercept, f.chi2_dof,
                          f.points, f.window.lo, f.window.hi, f.unit_weights});
  return r;
}

ResultRecord legendre_record(const reaction::LegendreFit& f, const std::string& label, const Provenance& prov) {
  json cov = json::array();
  for (std::size_t i = 0; i < f.covariance.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < f.covariance.cols(); ++j) row.push_back(f.covariance(i, j));
    cov.push_back(row);
  }
  ResultRecord r = make("legendre_fit", prov,
                        {{"label", label},
                         {"max_order", f.max_order},
                         {"coefficients", array_of(f.coefficients)},
                         {"covariance", cov},
                         {"chi2", f.chi2},
                         {"dof", f.dof},
                         {"chi2_dof", f.chi2_dof},
                         {"unit_weights", f.unit_weights}},
                        {"label", "k", "a_k", "a_k_err", "chi2_dof", "dof", "unit_weights"});
  for (std::size_t k = 0; k < f.coefficients.size(); ++k)
    r.table.rows.push_back({label, k, f.coefficients[k], std::sqrt(std::max(f.covariance(k, k), 0.0)), f.chi2_dof,
                            f.dof, f.unit_weights});
  return r;
}

ResultRecord asymmetry_record(const reaction::LegendreFit& f, const std::string& label, const Provenance& prov) {
  const auto a = reaction::asymmetry_report(f);
  const auto p = reaction::phase_time_proxy(f);
  ResultRecord r = make("asymmetry", prov,
                        {{"label", label},
                         {"a1_over_a0", a.ratio},
                         {"a1_over_a0_err", a.ratio_err},
                         {"significance", a.significance},
                         {"forward_backward", a.forward_backward},
                         {"forward_backward_err", a.forward_backward_err},
                         {"memory_retained", a.memory_retained},
                         {"proxy", p.value},
                         {"proxy_err", p.error},
                         {"proxy_label", p.label}},
                        {"label", "a1_over_a0", "a1_over_a0_err", "significance", "forward_backward",
                         "forward_backward_err", "memory_retained", "proxy", "proxy_label"});
  r.table.rows.push_back({label, a.ratio, a.ratio_err, a.significance, a.forward_backward, a.forward_backward_err,
                          a.memory_retained, p.value, p.label});
  return r;
}

ResultRecord timescale_record(const reaction::TimescaleReport& t, const Provenance& prov) {
  ResultRecord r = make("timescale", prov,
                        {{"gamma_down_MeV", t.gamma_down_mev},
                         {"gamma_cn_keV", t.gamma_cn_kev},
                         {"time_ratio", t.time_ratio},
                         {"tau_relax_s", t.tau_relax_s},
                         {"tau_process_s", t.tau_process_s},
                         {"log2_n_eff", t.log2_n_eff},
                         {"n_eff", t.n_eff},
                         {"qubit_equiv", t.qubit_equiv},
                         {"level_density", {{"a", t.level_density.a}, {"U", t.level_density.excitation}}}},
                        {"gamma_down_MeV", "gamma_cn_keV", "time_ratio", "tau_relax_s", "tau_process_s",
                         "log2_n_eff", "n_eff", "qubit_equiv", "a", "U"});
  r.table.rows.push_back({t.gamma_down_mev, t.gamma_cn_kev, t.time_ratio, t.tau_relax_s, t.tau_process_s,
                          t.log2_n_eff, t.n_eff, t.qubit_equiv, t.level_density.a, t.level_density.excitation});
  return r;
}

std::vector<ResultRecord> run_ensemble(const RunConfig& config, const RecordSink& sink) {
  if (auto errs = config.validate(); !errs.empty()) throw ValidationError(errs.front());
  Provenance prov;
  prov.config_hash = config_hash(config);
  prov.seed = config.seed;
  if (config.mode == Mode::Analyze) {
    for (const auto& group : {config.reaction.spectra, config.reaction.angular})
      for (const auto& p : group) {
        try {
          prov.inputs[p.string()] = records::sha256_file(p);
        } catch (const std::runtime_error& e) {
          throw ValidationError(e.what());
        }
      }
  }
  if (config.mode == Mode::Simulate && config.simulate.dump_spectra) std::filesystem::create_directories(config.out);

  switch (config.mode) {
    case Mode::Simulate: return run_simulate(config, prov, sink);
    case Mode::Scan: return run_scan(config, prov, sink);
    case Mode::Analyze: return run_analyze(config, prov, sink);
    case Mode::Synth: return run_synth(config, prov, sink);
    case Mode::Report: {
      auto rec = timescale_record(reaction::timescale_report(config.reaction.gamma_down_mev,
                                                             config.reaction.gamma_cn_kev,
                                                             config.reaction.level_density()),
                                  prov);
      if (sink) sink(rec);
      return {std::move(rec)};
    }
  }
  return {};
}

}  // namespace phasemem
