#pragma once

// File emission: trajectory/field CSV schemas, raw little-endian dumps with
// JSON sidecars, report serialization, content hashing, and the run manifest.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "acdb/experiments.hpp"

namespace acdb {

// Columns: t, energy_total, energy_bulk_grad, energy_bulk_beta,
// energy_bulk_pi, energy_boundary_grad, energy_boundary_beta,
// energy_boundary_pi, norm_l2_bulk, norm_l2_boundary, norm_h1_bulk,
// membership_violation_max. Formatting is locale-free and deterministic.
std::string trajectory_csv(const Trajectory& traj);

// Row-major grid with a "# nx=..,ny=..,lx=..,ly=..,t=.." header line.
std::string field_csv(const StripMesh& m, const Field& f, double t);

// Little-endian float64 dump, row-major, plus its JSON sidecar.
std::string field_raw(const Field& f);
std::string field_raw_sidecar(const StripMesh& m, double t, const std::string& data_file);

std::string report_text(const ExperimentReport& rep);
std::string report_json(const ExperimentReport& rep, const std::string& config_echo);

// FNV-1a 64-bit content hash, hex-encoded.
std::string fnv1a64_hex(std::span<const std::uint8_t> bytes);
std::string fnv1a64_hex(const std::string& s);

struct RunManifest {
  std::string tool_version;
  std::string command;
  std::string config_echo;  // resolved config document
  std::map<std::string, std::string> file_hashes;
  std::map<std::string, double> phase_seconds;

  std::string to_json() const;
};

void write_text_file(const std::filesystem::path& p, const std::string& content);

}  // namespace acdb
