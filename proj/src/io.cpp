#include "acdb/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace acdb {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json table_json(const ExperimentReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.table) {
    json r = json::array();
    for (double v : row) {
      if (std::isnan(v))
        r.push_back(nullptr);
      else
        r.push_back(v);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out =
      "t,energy_total,energy_bulk_grad,energy_bulk_beta,energy_bulk_pi,"
      "energy_boundary_grad,energy_boundary_beta,energy_boundary_pi,"
      "norm_l2_bulk,norm_l2_boundary,norm_h1_bulk,membership_violation_max\n";
  for (const StepRecord& r : traj.records) {
    out += num(r.t);
    const EnergyBreakdown& e = r.energy;
    for (double v : {e.total(), e.bulk_grad, e.bulk_beta, e.bulk_pi, e.boundary_grad,
                     e.boundary_beta, e.boundary_pi, r.norm.l2_bulk, r.norm.l2_boundary,
                     r.norm.h1_semi_bulk, r.membership_violation}) {
      out += ',';
      out += num(v);
    }
    out += '\n';
  }
  return out;
}

std::string field_csv(const StripMesh& m, const Field& f, double t) {
  std::string out = "# nx=" + std::to_string(m.nx) + ",ny=" + std::to_string(m.ny) +
                    ",lx=" + num(m.lx) + ",ly=" + num(m.ly) + ",t=" + num(t) + "\n";
  for (int j = 0; j < m.ny; ++j) {
    for (int i = 0; i < m.nx; ++i) {
      if (i) out += ',';
      out += num(f(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string field_raw(const Field& f) {
  std::string out(f.v.size() * sizeof(double), '\0');
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), f.v.data(), out.size());
  } else {
    for (std::size_t k = 0; k < f.v.size(); ++k) {
      unsigned char b[sizeof(double)];
      std::memcpy(b, &f.v[k], sizeof(double));
      for (std::size_t q = 0; q < sizeof(double); ++q)
        out[k * sizeof(double) + q] = (char)b[sizeof(double) - 1 - q];
    }
  }
  return out;
}

std::string field_raw_sidecar(const StripMesh& m, double t, const std::string& data_file) {
  json j{{"file", data_file},
         {"dtype", "float64"},
         {"byte_order", "little"},
         {"order", "row-major"},
         {"shape", {m.ny, m.nx}},
         {"nx", m.nx},
         {"ny", m.ny},
         {"lx", m.lx},
         {"ly", m.ly},
         {"t", t}};
  return j.dump(2) + "\n";
}

std::string report_text(const ExperimentReport& rep) {
  std::string out = "experiment: " + rep.id + "\n";
  out += "wall_time_s: " + num(rep.wall_time_s) + "\n";
  out += "columns:";
  for (const auto& c : rep.columns) out += " " + c;
  out += "\n";
  for (const auto& row : rep.table) {
    for (std::size_t k = 0; k < row.size(); ++k)
      out += (k ? " " : "  ") + (std::isnan(row[k]) ? std::string("-") : num(row[k]));
    out += "\n";
  }
  if (!rep.derived.empty()) {
    out += "derived:\n";
    for (const auto& [k, v] : rep.derived) out += "  " + k + " = " + num(v) + "\n";
  }
  out += "checks:\n";
  for (const auto& [k, v] : rep.pass)
    out += "  " + k + ": " + (v ? "pass" : "FAIL") + "\n";
  out += rep.all_pass() ? "result: PASS\n" : "result: FAIL\n";
  return out;
}

std::string report_json(const ExperimentReport& rep, const std::string& config_echo) {
  json j;
  j["experiment"] = rep.id;
  j["config"] = json::parse(config_echo.empty() ? "null" : config_echo);
  j["columns"] = rep.columns;
  j["table"] = table_json(rep);
  j["derived"] = rep.derived;
  j["pass"] = rep.pass;
  j["all_pass"] = rep.all_pass();
  j["wall_time_s"] = rep.wall_time_s;
  return j.dump(2) + "\n";
}

std::string fnv1a64_hex(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string fnv1a64_hex(const std::string& s) {
  return fnv1a64_hex(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::string RunManifest::to_json() const {
  json j;
  j["tool"] = "acdb";
  j["version"] = tool_version;
  j["command"] = command;
  j["config"] = json::parse(config_echo.empty() ? "null" : config_echo);
  json files = json::object();
  for (const auto& [name, hash] : file_hashes) files[name] = "fnv1a64:" + hash;
  j["files"] = files;
  j["wall_time_s"] = phase_seconds;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out.write(content.data(), (std::streamsize)content.size());
  if (!out) throw std::runtime_error("short write to '" + p.string() + "'");
}

}  // namespace acdb
