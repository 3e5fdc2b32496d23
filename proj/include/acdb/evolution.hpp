#pragma once

// Backward-Euler time integration of the coupled bulk/boundary inclusion.
// Two steppers share one variational assembly: a damped-Newton solve of the
// fully implicit Yosida-regularized system, and a Lie splitting whose graph
// substep is the exact pointwise resolvent. Energies and norms mirror the
// a priori estimates and are recorded per step.

#include <memory>
#include <optional>
#include <vector>

#include "acdb/forms.hpp"
#include "acdb/graphs.hpp"
#include "acdb/mesh.hpp"

namespace acdb {

enum class Scheme { RegularizedNewton, ProxSplitting };

struct SolverConfig {
  StripMesh mesh;
  double nu = 1.0;
  double eps = 1e-3;   // 0 only with the prox scheme
  double dt = 1e-3;
  double t_final = 0.1;
  Scheme scheme = Scheme::RegularizedNewton;
  PotentialPair bulk;
  PotentialPair boundary;
  SpaceTimeFn forcing_bulk;
  SpaceTimeFn forcing_boundary;
  SpaceTimeFn initial;
  std::optional<Field> initial_override;  // grid data instead of a closed form
  std::vector<double> snapshot_times;
  bool keep_fields = false;  // retain every step's field (experiments)

  int step_count() const;
  void validate() const;  // throws std::invalid_argument with the failing key
};

struct EnergyBreakdown {
  double bulk_grad = 0.0;
  double bulk_beta = 0.0;
  double bulk_pi = 0.0;
  double boundary_grad = 0.0;
  double boundary_beta = 0.0;
  double boundary_pi = 0.0;

  double total() const {
    return bulk_grad + bulk_beta + bulk_pi + boundary_grad + boundary_beta + boundary_pi;
  }
};

struct SolverState {
  double t = 0.0;
  Field u;
  Field xi;  // nodal selection for the bulk graph (defined on every row)
  std::vector<double> xi_gamma_bottom;
  std::vector<double> xi_gamma_top;
};

struct StepRecord {
  double t = 0.0;
  EnergyBreakdown energy;
  NormSet norm;
  double membership_violation = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> records;                 // [0] is the initial state
  std::vector<std::pair<double, Field>> snapshots;
  std::vector<Field> fields;                       // populated when keep_fields
  bool gronwall_ok = true;        // zero-forcing exponential envelope
  double gronwall_max_ratio = 0.0;
  double max_energy_increase = 0.0;  // largest E(t^{n+1}) - E(t^n)
  double time_integral_dtu_sq = 0.0; // sum dt ||(u^n - u^{n-1})/dt||^2 (bulk+boundary)
};

// PDE-comparison selection recovery; a diagnostic, never fatal.
struct SelectionDiagnostic {
  Field xi;
  std::vector<double> xi_gamma_bottom;
  std::vector<double> xi_gamma_top;
  double max_distance_bulk = 0.0;      // to the scheme's bulk graph
  double max_distance_boundary = 0.0;  // to the scheme's boundary graph
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompatibilityError : public std::invalid_argument {
 public:
  explicit CompatibilityError(const CompatibilityReport& rep);
  CompatibilityReport report;
};

class Solver {
 public:
  // Validates the config and certifies the (beta, beta_Gamma) compatibility;
  // the certified eta parameterizes the boundary Yosida map.
  explicit Solver(SolverConfig cfg);
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;

  const SolverConfig& config() const { return cfg_; }
  const CompatibilityReport& compatibility() const { return compat_; }
  double eta() const { return compat_.eta; }

  SolverState initial_state() const;
  SolverState step(const SolverState& s) const;
  EnergyBreakdown energy(const SolverState& s) const;
  Trajectory run() const;

  SelectionDiagnostic recover_selection(const SolverState& before,
                                        const SolverState& after) const;

  // u - nu lap u = u0 with the boundary graph acting through the outward
  // flux; Newton on the eps = 1e-8 regularization of the graph.
  static Field mollify_initial(const StripMesh& mesh, const Field& u0, double nu,
                               const ScalarGraph& beta_gamma);

 private:
  struct Assembly;

  SolverState step_regularized(const SolverState& s) const;
  SolverState step_prox(const SolverState& s) const;
  double beta_eps(double r) const;
  double beta_gamma_eps(double r) const;

  SolverConfig cfg_;
  CompatibilityReport compat_;
  std::unique_ptr<Assembly> asm_;
};

}  // namespace acdb
