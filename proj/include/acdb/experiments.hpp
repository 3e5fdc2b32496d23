#pragma once

// Executable well-posedness experiments: continuous dependence with an
// explicit Gronwall constant, the eps -> 0 Cauchy/cross-scheme study, the
// nu -> 0 study with mollified initial data, manufactured-solution order
// verification, and energy-decay runs. Reports are self-auditing: every pass
// flag is recomputable from the embedded table.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "acdb/evolution.hpp"

namespace acdb {

struct ExperimentReport {
  std::string id;
  SolverConfig config;  // resolved base config of the experiment
  std::vector<std::string> columns;
  std::vector<std::vector<double>> table;
  std::map<std::string, double> derived;
  std::map<std::string, bool> pass;
  double wall_time_s = 0.0;

  bool all_pass() const {
    for (const auto& [k, v] : pass)
      if (!v) return false;
    return true;
  }
};

struct PerturbationSpec {
  enum class Datum { InitialData, ForcingBulk, ForcingBoundary };
  Datum datum = Datum::InitialData;
  SpaceTimeFn shape;
  double amplitude = 0.0;

  static const char* datum_name(Datum d);
};

// Solves the base and perturbed problems for every amplitude and checks
//   LHS <= C_G * RHS,  C_G = exp((2 max(L, L_Gamma) + 1) T),
// where LHS collects the squared difference norms (max-in-time L2 plus
// time-integrated gradient terms) and RHS the squared data differences.
// Also checks quadratic scaling: LHS(q*delta)/LHS(delta) <= 1.5 q^2.
ExperimentReport run_contdep(const SolverConfig& cfg, const PerturbationSpec& spec,
                             std::span<const double> amplitudes, int threads = 1);

// Regularized runs along a decreasing eps list: Cauchy gaps between
// consecutive runs must decrease, the smallest-eps run must agree with the
// prox reference within 5x the last gap, and the time-integrated
// ||beta_eps(u)||^2 diagnostic must not grow more than 10% per level.
ExperimentReport run_eps_sweep(const SolverConfig& cfg, std::span<const double> eps_list,
                               int threads = 1);

// For each nu: mollified initial data, a nu-run, and the nu = 0 reference
// with raw data; e(nu) must decrease along the list. Also records the
// mollifier deviation and the nu ||Delta_Gamma v|| trend.
ExperimentReport run_nu_sweep(const SolverConfig& cfg, std::span<const double> nu_list,
                              int threads = 1);

struct MmsLevel {
  int nx = 0;
  int ny = 0;
  double dt = 0.0;
};

// Manufactured-solution orders against the double-well system: spatial order
// on simultaneous (h, dt ~ h^2) refinement, temporal order by successive
// dt-halving differences on the finest grid.
ExperimentReport run_mms(const SolverConfig& base, std::span<const MmsLevel> levels,
                         std::span<const double> temporal_dts, double x_phase = 0.0,
                         int threads = 1);

// Zero-forcing trajectory with the per-step dissipation assertion.
ExperimentReport run_energy_decay(const SolverConfig& cfg);

// The monotone-graph property suite on a configured potential pair:
// resolvent nonexpansiveness, Yosida Lipschitz/dominance bounds, the scaling
// and shift identities, graph membership, and the compatibility certificate
// with its eps-level transfer. Backs the graph-check command.
ExperimentReport run_graph_check(const PotentialPair& bulk, const PotentialPair& boundary);

}  // namespace acdb
