// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/config.hpp"

#include "phasemem/error.hpp"
#include "phasemem/reaction_io.hpp"
#include "phasemem/records.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace phasemem {

namespace pt = boost::property_tree;

std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Scan: return "scan";
    case Mode::Analyze: return "analyze";
    case Mode::Synth: return "synth";
    case Mode::Report: return "report";
  }
  return "?";
}

std::string_view to_string(OutputFormat f) noexcept { return f == OutputFormat::Json ? "json" : "csv"; }

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::Simulate, Mode::Scan, Mode::Analyze, Mode::Synth, Mode::Report})
    if (s == to_string(m)) return m;
  throw ValidationError("unknown mode '" + std::string(s) + "' (expected simulate|scan|analyze|synth|report)");
}

OutputFormat parse_format(std::string_view s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw ValidationError("unknown format '" + std::string(s) + "' (expected json|csv)");
}

reaction::LevelDensityParams ReactionBlock::level_density() const {
  auto ld = reaction::default_level_density(mass_number, beam_mev, separation_mev, emission_mev);
  if (level_a) ld.a = *level_a;
  if (excitation_mev) ld.excitation = *excitation_mev;
  return ld;
}

ModelConfig RunConfig::effective_model() const {
  ModelConfig m = model;
  m.master_seed = seed;
  m.j_bound = j_over_delta0 * model.delta0;
  return m;
}

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errs;
  if (workers < 1) errs.emplace_back("run.workers: must be >= 1 (got " + std::to_string(workers) + ")");
  if (out.empty()) errs.emplace_back("run.out: must not be empty");
  std::error_code ec;
  if (!out.empty() && std::filesystem::exists(out, ec) && !std::filesystem::is_directory(out, ec))
    errs.emplace_back("run.out: '" + out.string() + "' exists and is not a directory");

  if (mode == Mode::Simulate || mode == Mode::Scan) {
    for (auto& e : model.validate()) errs.push_back(std::move(e));
    if (!(j_over_delta0 >= 0.0)) errs.emplace_back("model.j_over_delta0: must be >= 0");
    if (!(mixing.window_fraction > 0.0 && mixing.window_fraction <= 1.0))
      errs.emplace_back("mixing.window: must lie in (0, 1]");
    if (mixing.width.bin_width < 0.0) errs.emplace_back("mixing.bin_width: must be >= 0 (0 selects sigma/8)");
    if (!(mixing.width.smoothing_bins >= 0.0)) errs.emplace_back("mixing.smoothing_bins: must be >= 0");
    if (!(mixing.width.tail_cutoff > 0.0)) errs.emplace_back("mixing.tail_cutoff: must be > 0");
  }
  if (mode == Mode::Simulate && simulate.realizations < 1) errs.emplace_back("simulate.realizations: must be >= 1");
  if (mode == Mode::Scan) {
    if (scan.grid.empty()) errs.emplace_back("scan.grid: must not be empty");
    for (double g : scan.grid)
      if (!(g >= 0.0)) errs.emplace_back("scan.grid: values must be >= 0");
    if (scan.realizations < 1) errs.emplace_back("scan.realizations: must be >= 1");
  }
  if (mode == Mode::Analyze || mode == Mode::Report) {
    if (mode == Mode::Analyze && reaction.spectra.empty() && reaction.angular.empty())
      errs.emplace_back("reaction.spectra/reaction.angular: analyze needs at least one input file");
    if (!(reaction.r0 > 0.0)) errs.emplace_back("reaction.r0: must be > 0");
    if (reaction.fit_window && !(reaction.fit_window->lo < reaction.fit_window->hi))
      errs.emplace_back("reaction.fit_lo/fit_hi: fit_lo must be < fit_hi");
    if (reaction.legendre_order < 0 || reaction.legendre_order > 8)
      errs.emplace_back("reaction.legendre_order: must lie in [0, 8]");
    if (!(reaction.gamma_down_mev > 0.0)) errs.emplace_back("reaction.gamma_down_MeV: must be > 0");
    if (!(reaction.gamma_cn_kev > 0.0)) errs.emplace_back("reaction.gamma_cn_keV: must be > 0");
    if (!(reaction.mass_number > 0.0)) errs.emplace_back("reaction.mass_number: must be > 0");
    if (reaction.level_a && !(*reaction.level_a > 0.0)) errs.emplace_back("reaction.level_a: must be > 0");
    const double u = reaction.level_density().excitation;
    if (!(u > 0.0)) errs.emplace_back("reaction: excitation energy U must be > 0 (got " + io::format_double(u) + ")");
  }
  if (mode == Mode::Synth) {
    try {
      synth.validate();
    } catch (const ValidationError& e) {
      errs.emplace_back(e.what());
    }
  }
  return errs;
}

namespace {

template <class T>
bool parse_scalar(std::string_view s, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    out = std::string(s);
    return true;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return out = true, true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return out = false, true;
    return false;
  } else {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return false;
    out = v;
    return true;
  }
}

template <class T>
constexpr const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "boolean";
  else if constexpr (std::is_floating_point_v<T>) return "number";
  else if constexpr (std::is_unsigned_v<T>) return "non-negative integer";
  else return "integer";
}

std::string strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

class Reader {
 public:
  Reader(const pt::ptree& root, std::vector<std::string>& errors) : root_(root), errors_(errors) {}

  const std::string* raw(const std::string& section, const std::string& key) {
    const auto sec = root_.find(section);
    if (sec == root_.not_found()) return nullptr;
    const auto it = sec->second.find(key);
    if (it == sec->second.not_found()) return nullptr;
    used_.insert(section + "." + key);
    return &it->second.data();
  }

  bool has(const std::string& section, const std::string& key) {
    return raw(section, key) != nullptr;
  }

  template <class T>
  void get(const std::string& section, const std::string& key, T& dst) {
    const std::string* v = raw(section, key);
    if (!v) return;
    const std::string s = strip(*v);
    if constexpr (!std::is_same_v<T, std::string>) {
      if (!parse_scalar(s, dst)) errors_.push_back(section + "." + key + ": expected " + type_name<T>() + ", got '" + s + "'");
    } else {
      dst = s;
    }
  }

  template <class T>
  void get(const std::string& section, const std::string& key, std::optional<T>& dst) {
    if (!has(section, key)) return;
    T v{};
    const std::size_t before = errors_.size();
    get(section, key, v);
    if (errors_.size() == before) dst = v;
  }

  void get_list(const std::string& section, const std::string& key, std::vector<double>& dst) {
    const std::string* v = raw(section, key);
    if (!v) return;
    dst.clear();
    for (const auto& item : split_list(*v)) {
      double x = 0;
      if (!parse_scalar(item, x))
        errors_.push_back(section + "." + key + ": expected a list of numbers, got '" + item + "'");
      else
        dst.push_back(x);
    }
  }

  template <class E, class F>
  void get_enum(const std::string& section, const std::string& key, E& dst, F parse) {
    const std::string* v = raw(section, key);
    if (!v) return;
    try {
      dst = parse(strip(*v));
    } catch (const ValidationError& e) {
      errors_.push_back(section + "." + key + ": " + e.what());
    }
  }

  void unknown_keys(std::vector<std::string>& warnings) const {
    for (const auto& [section, body] : root_) {
      if (!body.data().empty()) {
        warnings.push_back("ignoring key '" + section + "' outside any section");
        continue;
      }
      for (const auto& [key, value] : body)
        if (!used_.count(section + "." + key)) warnings.push_back("unknown key '" + section + "." + key + "' ignored");
    }
  }

 private:
  const pt::ptree& root_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

}  // namespace

ConfigResult parse_config(std::string_view text, const std::filesystem::path& base_dir, std::optional<Mode> mode) {
  ConfigResult result;
  auto& errors = result.errors;

  // The INI reader only knows whole-line ';' comments.
  std::string cleaned;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t");
      if (first != std::string::npos && line[first] == '#') line[first] = ';';
      for (std::size_t i = 1; i < line.size(); ++i)
        if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t') && i > first) {
          line.erase(i);
          break;
        }
      cleaned += line;
      cleaned += '\n';
    }
  }
  pt::ptree root;
  try {
    std::istringstream in(cleaned);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    errors.push_back("config line " + std::to_string(e.line()) + ": " + e.message());
    return result;
  }

  RunConfig cfg;
  Reader r(root, errors);
  if (mode) {
    cfg.mode = *mode;
    if (const std::string* v = r.raw("run", "mode"); v && strip(*v) != to_string(*mode))
      result.warnings.push_back("run.mode '" + strip(*v) + "' overridden by subcommand '" +
                                std::string(to_string(*mode)) + "'");
  } else if (!r.has("run", "mode")) {
    errors.emplace_back("run.mode: required (simulate|scan|analyze|synth|report)");
  } else {
    r.get_enum("run", "mode", cfg.mode, parse_mode);
  }
  r.get("run", "seed", cfg.seed);
  r.get("run", "workers", cfg.workers);
  std::string out;
  r.get("run", "out", out);
  if (!out.empty()) cfg.out = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out) : (base_dir / out).lexically_normal();
  r.get_enum("run", "format", cfg.format, parse_format);

  if ((cfg.mode == Mode::Simulate || cfg.mode == Mode::Scan) && !r.has("model", "n"))
    errors.emplace_back("model.n: required for " + std::string(to_string(cfg.mode)));
  r.get("model", "n", cfg.model.n);
  r.get("model", "delta0", cfg.model.delta0);
  r.get("model", "delta", cfg.model.delta);
  r.get("model", "j_over_delta0", cfg.j_over_delta0);
  r.get("model", "max_qubits", cfg.model.max_qubits);
  r.get_enum("model", "topology", cfg.model.topology, parse_topology);
  r.get_enum("model", "coupling", cfg.model.coupling_op, parse_coupling_op);

  r.get("mixing", "window", cfg.mixing.window_fraction);
  r.get_enum("mixing", "width_method", cfg.mixing.width.method, parse_width_method);
  r.get("mixing", "bin_width", cfg.mixing.width.bin_width);
  r.get("mixing", "smoothing_bins", cfg.mixing.width.smoothing_bins);
  r.get("mixing", "tail_cutoff", cfg.mixing.width.tail_cutoff);

  r.get("simulate", "realizations", cfg.simulate.realizations);
  r.get("simulate", "profiles", cfg.simulate.profiles);
  r.get("simulate", "dump_spectra", cfg.simulate.dump_spectra);

  if (cfg.mode == Mode::Scan && !r.has("scan", "grid")) errors.emplace_back("scan.grid: required for scan");
  r.get_list("scan", "grid", cfg.scan.grid);
  r.get("scan", "realizations", cfg.scan.realizations);

  auto paths = [&](const std::string& key, std::vector<std::filesystem::path>& dst) {
    if (const std::string* v = r.raw("reaction", key))
      for (const auto& item : split_list(*v)) {
        std::filesystem::path p(item);
        dst.push_back(p.is_absolute() ? p : (base_dir / p).lexically_normal());
      }
  };
  paths("spectra", cfg.reaction.spectra);
  paths("angular", cfg.reaction.angular);
  r.get("reaction", "r0", cfg.reaction.r0);
  std::optional<double> lo, hi;
  r.get("reaction", "fit_lo", lo);
  r.get("reaction", "fit_hi", hi);
  if (lo.has_value() != hi.has_value())
    errors.emplace_back("reaction.fit_lo/fit_hi: give both or neither");
  else if (lo)
    cfg.reaction.fit_window = reaction::EnergyWindow{*lo, *hi};
  r.get("reaction", "legendre_order", cfg.reaction.legendre_order);
  r.get("reaction", "gamma_down_MeV", cfg.reaction.gamma_down_mev);
  r.get("reaction", "gamma_cn_keV", cfg.reaction.gamma_cn_kev);
  r.get("reaction", "mass_number", cfg.reaction.mass_number);
  r.get("reaction", "beam_MeV", cfg.reaction.beam_mev);
  r.get("reaction", "separation_MeV", cfg.reaction.separation_mev);
  r.get("reaction", "emission_MeV", cfg.reaction.emission_mev);
  r.get("reaction", "level_a", cfg.reaction.level_a);
  r.get("reaction", "excitation_MeV", cfg.reaction.excitation_mev);

  auto& s = cfg.synth;
  r.get("synth", "temperature", s.temperature);
  r.get("synth", "endpoint", s.endpoint);
  r.get("synth", "e_min", s.e_min);
  r.get("synth", "e_step", s.e_step);
  r.get("synth", "direct_fraction", s.direct_fraction);
  r.get_list("synth", "angles", s.angles);
  r.get("synth", "noise", s.noise);
  r.get("synth", "normalization", s.normalization);
  r.get("synth", "beam_MeV", s.beam_mev);
  r.get("synth", "Zp", s.channel.z_projectile);
  r.get("synth", "Zt", s.channel.z_target);
  r.get("synth", "At", s.channel.a_target);
  r.get("synth", "r0", s.channel.r0);
  std::optional<double> wlo, whi;
  r.get("synth", "window_lo", wlo);
  r.get("synth", "window_hi", whi);
  if (wlo.has_value() != whi.has_value())
    errors.emplace_back("synth.window_lo/window_hi: give both or neither");
  else if (wlo)
    s.angular_window = reaction::EnergyWindow{*wlo, *whi};
  r.get("synth", "label", s.label);

  r.unknown_keys(result.warnings);
  cfg.synth.seed = cfg.seed;
  for (auto& e : cfg.validate()) errors.push_back(std::move(e));
  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

ConfigResult load_config(const std::filesystem::path& path, std::optional<Mode> mode) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const ValidationError& e) {
    ConfigResult r;
    r.errors.emplace_back(e.what());
    return r;
  }
  return parse_config(text, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path(), mode);
}

std::string canonical_config(const RunConfig& c) {
  using json = nlohmann::ordered_json;
  auto names = [](const std::vector<std::filesystem::path>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(p.filename().string());
    return a;
  };
  json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  switch (c.mode) {
    case Mode::Simulate:
    case Mode::Scan:
      j["model"] = {{"n", c.model.n},
                    {"delta0", c.model.delta0},
                    {"delta", c.model.delta},
                    {"j_over_delta0", c.j_over_delta0},
                    {"topology", to_string(c.model.topology)},
                    {"coupling", to_string(c.model.coupling_op)}};
      j["mixing"] = {{"window", c.mixing.window_fraction},
                     {"width_method", to_string(c.mixing.width.method)},
                     {"bin_width", c.mixing.width.bin_width},
                     {"smoothing_bins", c.mixing.width.smoothing_bins},
                     {"tail_cutoff", c.mixing.width.tail_cutoff}};
      if (c.mode == Mode::Simulate)
        j["simulate"] = {{"realizations", c.simulate.realizations}, {"profiles", c.simulate.profiles}};
      else
        j["scan"] = {{"grid", c.scan.grid}, {"realizations", c.scan.realizations}};
      break;
    case Mode::Analyze:
    case Mode::Report: {
      const auto ld = c.reaction.level_density();
      json rj = {{"r0", c.reaction.r0},
                 {"legendre_order", c.reaction.legendre_order},
                 {"gamma_down_MeV", c.reaction.gamma_down_mev},
                 {"gamma_cn_keV", c.reaction.gamma_cn_kev},
                 {"level_a", ld.a},
                 {"excitation_MeV", ld.excitation}};
      if (c.reaction.fit_window) rj["fit_window"] = {c.reaction.fit_window->lo, c.reaction.fit_window->hi};
      if (c.mode == Mode::Analyze) {
        rj["spectra"] = names(c.reaction.spectra);
        rj["angular"] = names(c.reaction.angular);
      }
      j["reaction"] = rj;
      break;
    }
    case Mode::Synth: {
      const auto& s = c.synth;
      j["synth"] = {{"temperature", s.temperature}, {"endpoint", s.endpoint},   {"e_min", s.e_min},
                    {"e_step", s.e_step},           {"direct_fraction", s.direct_fraction},
                    {"angles", s.angles},           {"noise", s.noise},         {"normalization", s.normalization},
                    {"beam_MeV", s.beam_mev},       {"Zp", s.channel.z_projectile},
                    {"Zt", s.channel.z_target},     {"At", s.channel.a_target}, {"r0", s.channel.r0},
                    {"label", s.label}};
      if (s.angular_window) j["synth"]["window"] = {s.angular_window->lo, s.angular_window->hi};
      break;
    }
  }
  return j.dump();
}

std::string config_hash(const RunConfig& config) { return records::sha256_hex(canonical_config(config)); }

}  // namespace phasemem
