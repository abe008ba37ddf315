// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/reaction_io.hpp"

#include "phasemem/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace phasemem::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string squeeze(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\r') out.push_back(c);
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

struct RawTable {
  std::map<std::string, std::pair<std::string, std::size_t>> meta;  // key -> (value, line)
  std::string header;
  std::size_t header_line = 0;
  std::vector<Line> rows;
};

RawTable split(std::string_view text, std::string_view source) {
  RawTable t;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    ++number;
    pos = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      const std::size_t colon = body.find(':');
      if (colon != std::string_view::npos && t.header.empty())
        t.meta[std::string(trim(body.substr(0, colon)))] = {std::string(trim(body.substr(colon + 1))), number};
    } else if (t.header.empty()) {
      t.header = squeeze(line);
      t.header_line = number;
    } else {
      t.rows.push_back({number, line});
    }
    if (end == text.size()) break;
  }
  if (t.header.empty()) throw ValidationError(std::string(source) + ": no column header found");
  return t;
}

std::string at(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

std::array<double, 3> parse_row(const Line& row, std::string_view source) {
  std::array<double, 3> v{};
  std::size_t field = 0;
  std::size_t pos = 0;
  const std::string_view s = row.text;
  while (true) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    if (field == 3) throw ValidationError(at(source, row.number) + "malformed row: more than 3 fields");
    const auto num = parse_number<double>(s.substr(pos, comma - pos));
    if (!num || !std::isfinite(*num))
      throw ValidationError(at(source, row.number) + "malformed row: field " + std::to_string(field + 1) +
                            " is not a finite number ('" + std::string(trim(s.substr(pos, comma - pos))) + "')");
    v[field++] = *num;
    if (comma == s.size()) break;
    pos = comma + 1;
  }
  if (field != 3) throw ValidationError(at(source, row.number) + "malformed row: expected 3 fields, got " + std::to_string(field));
  return v;
}

template <class T>
std::optional<T> meta_number(const RawTable& t, const std::string& key, std::string_view source) {
  const auto it = t.meta.find(key);
  if (it == t.meta.end()) return std::nullopt;
  const auto v = parse_number<T>(it->second.first);
  if (!v) throw ValidationError(at(source, it->second.second) + "metadata '" + key + "' has invalid value '" + it->second.first + "'");
  return v;
}

std::string meta_label(const RawTable& t) {
  const auto it = t.meta.find("reaction");
  return it == t.meta.end() ? std::string() : it->second.first;
}

reaction::ParticleSpectrum to_spectrum(const RawTable& t, std::string_view source) {
  reaction::ParticleSpectrum s;
  std::string missing;
  for (const char* key : {"angle_deg", "Zp", "Zt", "At"})
    if (!t.meta.count(key)) missing += std::string(missing.empty() ? "" : ", ") + key;
  if (!missing.empty()) throw ValidationError(std::string(source) + ": missing metadata keys: " + missing);
  s.angle_deg = *meta_number<double>(t, "angle_deg", source);
  s.beam_mev = meta_number<double>(t, "beam_MeV", source);
  s.z_projectile = meta_number<int>(t, "Zp", source);
  s.z_target = meta_number<int>(t, "Zt", source);
  s.a_target = meta_number<double>(t, "At", source);
  s.label = meta_label(t);
  for (const Line& row : t.rows) {
    const auto v = parse_row(row, source);
    if (!s.energy.empty() && !(v[0] > s.energy.back()))
      throw ValidationError(at(source, row.number) + "energies not strictly increasing (" + format_double(v[0]) +
                            " after " + format_double(s.energy.back()) + ")");
    if (v[1] < 0.0) throw ValidationError(at(source, row.number) + "negative yield");
    if (v[2] < 0.0) throw ValidationError(at(source, row.number) + "negative yield error");
    s.energy.push_back(v[0]);
    s.yield.push_back(v[1]);
    s.yield_err.push_back(v[2]);
    s.source_lines.push_back(row.number);
  }
  if (s.energy.empty()) throw ValidationError(std::string(source) + ": no data rows");
  s.validate();
  return s;
}

reaction::AngularDistribution to_angular(const RawTable& t, std::string_view source) {
  reaction::AngularDistribution d;
  d.e_min_mev = meta_number<double>(t, "e_min_MeV", source);
  d.e_max_mev = meta_number<double>(t, "e_max_MeV", source);
  d.label = meta_label(t);
  for (const Line& row : t.rows) {
    const auto v = parse_row(row, source);
    if (!(v[0] > 0.0 && v[0] < 180.0)) throw ValidationError(at(source, row.number) + "theta outside (0, 180)");
    if (v[1] < 0.0) throw ValidationError(at(source, row.number) + "negative cross section");
    if (v[2] < 0.0) throw ValidationError(at(source, row.number) + "negative error");
    d.theta_deg.push_back(v[0]);
    d.dsdo.push_back(v[1]);
    d.err.push_back(v[2]);
    d.source_lines.push_back(row.number);
  }
  if (d.theta_deg.empty()) throw ValidationError(std::string(source) + ": no data rows");
  return d;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Dataset parse_dataset(std::string_view text, std::string_view source) {
  const RawTable t = split(text, source);
  if (t.header == kSpectrumHeader) return to_spectrum(t, source);
  if (t.header == kAngularHeader) return to_angular(t, source);
  throw ValidationError(at(source, t.header_line) + "unrecognised header '" + t.header + "' (expected '" +
                        std::string(kSpectrumHeader) + "' or '" + std::string(kAngularHeader) + "')");
}

reaction::ParticleSpectrum parse_spectrum(std::string_view text, std::string_view source) {
  const RawTable t = split(text, source);
  if (t.header != kSpectrumHeader)
    throw ValidationError(at(source, t.header_line) + "expected header '" + std::string(kSpectrumHeader) + "'");
  return to_spectrum(t, source);
}

reaction::AngularDistribution parse_angular(std::string_view text, std::string_view source) {
  const RawTable t = split(text, source);
  if (t.header != kAngularHeader)
    throw ValidationError(at(source, t.header_line) + "expected header '" + std::string(kAngularHeader) + "'");
  return to_angular(t, source);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Dataset ingest(const std::filesystem::path& path) { return parse_dataset(read_file(path), path.string()); }

void write_spectrum_csv(std::ostream& os, const reaction::ParticleSpectrum& s) {
  os << "# angle_deg: " << format_double(s.angle_deg) << '\n';
  if (s.beam_mev) os << "# beam_MeV: " << format_double(*s.beam_mev) << '\n';
  if (s.z_projectile) os << "# Zp: " << *s.z_projectile << '\n';
  if (s.z_target) os << "# Zt: " << *s.z_target << '\n';
  if (s.a_target) os << "# At: " << format_double(*s.a_target) << '\n';
  if (!s.label.empty()) os << "# reaction: " << s.label << '\n';
  os << kSpectrumHeader << '\n';
  for (std::size_t i = 0; i < s.energy.size(); ++i)
    os << format_double(s.energy[i]) << ',' << format_double(s.yield[i]) << ',' << format_double(s.yield_err[i]) << '\n';
}

void write_angular_csv(std::ostream& os, const reaction::AngularDistribution& d) {
  if (d.e_min_mev) os << "# e_min_MeV: " << format_double(*d.e_min_mev) << '\n';
  if (d.e_max_mev) os << "# e_max_MeV: " << format_double(*d.e_max_mev) << '\n';
  if (!d.label.empty()) os << "# reaction: " << d.label << '\n';
  os << kAngularHeader << '\n';
  for (std::size_t i = 0; i < d.theta_deg.size(); ++i)
    os << format_double(d.theta_deg[i]) << ',' << format_double(d.dsdo[i]) << ',' << format_double(d.err[i]) << '\n';
}

namespace {

template <class F>
void write_to(const std::filesystem::path& path, F&& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  body(os);
  if (!os.flush()) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_spectrum_csv(const std::filesystem::path& path, const reaction::ParticleSpectrum& spectrum) {
  write_to(path, [&](std::ostream& os) { write_spectrum_csv(os, spectrum); });
}

void write_angular_csv(const std::filesystem::path& path, const reaction::AngularDistribution& dist) {
  write_to(path, [&](std::ostream& os) { write_angular_csv(os, dist); });
}

}  // namespace phasemem::io
