// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#include "phasemem/records.hpp"

#include "phasemem/reaction_io.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace phasemem::records {

namespace {

std::string hex(const unsigned char* data, unsigned int len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xF]);
  }
  return out;
}

struct Sha256 {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};
  Sha256() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  }
  void update(const void* data, std::size_t len) { EVP_DigestUpdate(ctx.get(), data, len); }
  std::string finish() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    return hex(md, len);
  }
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::string csv_cell(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return "";
    case json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case json::value_t::number_float: return io::format_double(v.get<double>());
    case json::value_t::number_integer: return std::to_string(v.get<std::int64_t>());
    case json::value_t::number_unsigned: return std::to_string(v.get<std::uint64_t>());
    case json::value_t::string: {
      const auto& s = v.get_ref<const std::string&>();
      if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) {
        if (c == '"') q.push_back('"');
        q.push_back(c);
      }
      return q + "\"";
    }
    default: return v.dump();
  }
}

json provenance_json(const Provenance& p) {
  json inputs = json::object();
  for (const auto& [path, hash] : p.inputs) inputs[path] = hash;
  return {{"config_hash", p.config_hash}, {"inputs", inputs}, {"seed", p.seed}};
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.finish();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(is.gcount()));
  }
  return h.finish();
}

json ResultRecord::to_json() const {
  return {{"kind", kind}, {"provenance", provenance_json(provenance)}, {"tool_version", tool_version}, {"payload", payload}};
}

std::vector<std::string> ResultRecord::problems() const {
  std::vector<std::string> p;
  if (kind.empty()) p.emplace_back("record kind is empty");
  if (provenance.config_hash.size() != 64) p.emplace_back("provenance.config_hash missing or malformed");
  for (const auto& [path, hash] : provenance.inputs)
    if (hash.size() != 64) p.emplace_back("provenance hash missing for input " + path);
  if (tool_version.empty()) p.emplace_back("tool_version is empty");
  if (!payload.is_object()) p.emplace_back("payload is not an object");
  for (const auto& row : table.rows)
    if (row.size() != table.columns.size()) {
      p.emplace_back("table row width differs from column count");
      break;
    }
  return p;
}

std::string to_csv(const std::vector<const ResultRecord*>& records) {
  std::ostringstream os;
  if (records.empty()) return {};
  const auto& cols = records.front()->table.columns;
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const ResultRecord* r : records) {
    if (r->table.columns != cols)
      throw std::invalid_argument("records of kind '" + r->kind + "' disagree on CSV columns");
    for (const auto& row : r->table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
      os << '\n';
    }
  }
  return os.str();
}

std::vector<std::filesystem::path> emit(const std::vector<ResultRecord>& records, const std::filesystem::path& dir,
                                        Format format) {
  for (const auto& r : records)
    if (const auto p = r.problems(); !p.empty())
      throw std::invalid_argument("invalid " + r.kind + " record: " + p.front());
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::map<std::string, std::vector<const ResultRecord*>> by_kind;
  for (const auto& r : records) by_kind[r.kind].push_back(&r);

  std::vector<std::filesystem::path> written;
  json files = json::array();
  for (const auto& [kind, group] : by_kind) {
    std::string text;
    std::filesystem::path path;
    if (format == Format::Json) {
      json arr = json::array();
      for (const ResultRecord* r : group) arr.push_back(r->to_json());
      text = json{{"kind", kind}, {"records", arr}}.dump(2) + "\n";
      path = dir / (kind + ".json");
    } else {
      text = to_csv(group);
      path = dir / (kind + ".csv");
    }
    write_file(path, text);
    written.push_back(path);
    files.push_back({{"kind", kind},
                     {"file", path.filename().string()},
                     {"records", group.size()},
                     {"sha256", sha256_hex(text)},
                     {"provenance", provenance_json(group.front()->provenance)}});
  }
  const json manifest = {{"tool_version", PHASEMEM_VERSION},
                         {"format", format == Format::Json ? "json" : "csv"},
                         {"records", records.size()},
                         {"files", files}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  written.push_back(dir / "manifest.json");

  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  const json meta = {{"created_utc", stamp}, {"tool_version", PHASEMEM_VERSION}};
  write_file(dir / "manifest.meta.json", meta.dump(2) + "\n");
  written.push_back(dir / "manifest.meta.json");
  return written;
}

std::vector<std::string> verify_inputs(const ResultRecord& record) {
  std::vector<std::string> issues;
  for (const auto& [path, hash] : record.provenance.inputs) {
    try {
      const std::string now = sha256_file(path);
      if (now != hash) issues.push_back(path + ": sha256 mismatch (recorded " + hash + ", now " + now + ")");
    } catch (const std::exception& e) {
      issues.emplace_back(e.what());
    }
  }
  return issues;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream os(path_, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path_.string() + " for writing");
}

void JsonlWriter::write(const ResultRecord& record) {
  std::ofstream os(path_, std::ios::app);
  os << record.to_json().dump() << '\n';
  if (!os.flush()) throw std::runtime_error("write failed: " + path_.string());
}

}  // namespace phasemem::records
