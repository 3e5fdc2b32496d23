#include "acdb/evolution.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace acdb {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

namespace {

constexpr double kNewtonTol = 1e-10;
constexpr int kNewtonCap = 50;
constexpr int kDirectLimit = 100000;  // unknowns; above this use Jacobi-CG

// Symmetric stiffness in per-x-cell units (the common hx factor divided out):
// bulk gradient form plus, optionally, nu times the boundary tangential form.
SpMat build_stiffness(const StripMesh& m, double nu, bool with_boundary) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve((std::size_t)m.node_count() * 8);
  auto add_edge = [&](int a, int b, double c) {
    trip.emplace_back(a, a, c);
    trip.emplace_back(b, b, c);
    trip.emplace_back(a, b, -c);
    trip.emplace_back(b, a, -c);
  };
  const double cx = m.hy() / (m.hx() * m.hx());
  const double cy = 1.0 / m.hy();
  const double cb = nu / (m.hx() * m.hx());
  for (int j = 0; j < m.ny; ++j) {
    double w = (j == 0 || j == m.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i < m.nx; ++i) {
      int ir = (i == m.nx - 1) ? 0 : i + 1;
      add_edge(m.node(i, j), m.node(ir, j), w * cx);
    }
  }
  for (int j = 0; j + 1 < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) add_edge(m.node(i, j), m.node(i, j + 1), cy);
  if (with_boundary && nu > 0.0)
    for (int j : {0, m.ny - 1})
      for (int i = 0; i < m.nx; ++i) {
        int ir = (i == m.nx - 1) ? 0 : i + 1;
        add_edge(m.node(i, j), m.node(ir, j), cb);
      }
  SpMat a(m.node_count(), m.node_count());
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

struct LinearSolver {
  bool use_cg = false;
  bool analyzed = false;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;

  explicit LinearSolver(int n) : use_cg(n > kDirectLimit) {
    cg.setTolerance(1e-12);
    cg.setMaxIterations(20000);
  }

  void factor(const SpMat& j, const char* what) {
    if (use_cg) {
      cg.compute(j);
      if (cg.info() != Eigen::Success)
        throw SolverError(std::string(what) + ": iterative solver setup failed");
      return;
    }
    if (!analyzed) {
      ldlt.analyzePattern(j);
      analyzed = true;
    }
    ldlt.factorize(j);
    if (ldlt.info() != Eigen::Success)
      throw SolverError(std::string(what) + ": sparse factorization failed");
  }

  Vec solve(const Vec& b, const char* what) {
    Vec x = use_cg ? cg.solve(b).eval() : ldlt.solve(b).eval();
    if ((use_cg && cg.info() != Eigen::Success) ||
        (!use_cg && ldlt.info() != Eigen::Success))
      throw SolverError(std::string(what) + ": linear solve breakdown");
    return x;
  }
};

// R(w) = A w + n_val(w); J = A + diag(n_slope(w)). Damped Newton with the
// strong-form residual R / scale measured in the max norm.
Vec newton_solve(const SpMat& a,
                 const std::function<void(const Vec&, Vec&, Vec&)>& nonlinear,
                 Vec w, const Vec& scale, double t_now, const char* what) {
  const int n = (int)w.size();
  LinearSolver lin(n);
  Vec nval(n), nslope(n);
  auto strong_norm = [&](const Vec& r) {
    double mx = 0.0;
    for (int k = 0; k < n; ++k) mx = std::max(mx, std::fabs(r[k]) / scale[k]);
    return mx;
  };
  nonlinear(w, nval, nslope);
  Vec resid = a * w + nval;
  double rn = strong_norm(resid);
  for (int it = 0; it < kNewtonCap; ++it) {
    if (rn <= kNewtonTol) return w;
    SpMat j = a;
    for (int k = 0; k < n; ++k) j.coeffRef(k, k) += nslope[k];
    lin.factor(j, what);
    Vec dir = lin.solve(resid, what);
    double s = 1.0;
    Vec wn;
    double rn_new = 0.0;
    for (;;) {
      wn = w - s * dir;
      nonlinear(wn, nval, nslope);
      resid = a * wn + nval;
      rn_new = strong_norm(resid);
      if (rn_new < rn || s <= 1.0 / 64.0) break;
      s *= 0.5;
    }
    w = wn;
    rn = rn_new;
  }
  if (rn > kNewtonTol) {
    std::ostringstream os;
    os << what << ": Newton did not reach tolerance " << kNewtonTol << " at t = "
       << t_now << " (residual " << rn << " after " << kNewtonCap << " iterations)";
    throw SolverError(os.str());
  }
  return w;
}

double vertical_distance(const ScalarGraph& g, double y, double value) {
  ValueRange vr = value_range(g, y);
  if (vr.lo > vr.hi) return kInf;
  if (value < vr.lo) return vr.lo - value;
  if (value > vr.hi) return value - vr.hi;
  return 0.0;
}

}  // namespace

struct Solver::Assembly {
  SpMat stiffness;          // bulk + nu * boundary tangential
  Vec mass_bulk;            // hy * trapezoid weight
  Vec mass_gamma;           // 1 on boundary rows
  std::vector<double> xs, ys;
  double eps_gamma = 0.0;   // eps * eta
  bool prox_matrix_constant = false;
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> prox_fact;
};

CompatibilityError::CompatibilityError(const CompatibilityReport& rep)
    : std::invalid_argument("potential pair rejected: " + rep.detail), report(rep) {}

int SolverConfig::step_count() const {
  return (int)std::max<long long>(1, std::llround(t_final / dt));
}

void SolverConfig::validate() const {
  mesh.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("time.dt: must be > 0");
  if (!(t_final > 0.0)) throw std::invalid_argument("time.t_final: must be > 0");
  if (dt > t_final * (1.0 + 1e-12))
    throw std::invalid_argument("time.dt: must not exceed time.t_final");
  if (nu < 0.0) throw std::invalid_argument("model.nu: must be >= 0");
  if (eps < 0.0) throw std::invalid_argument("model.eps: must be >= 0");
  if (scheme == Scheme::RegularizedNewton && !(eps > 0.0))
    throw std::invalid_argument("model.eps: regularized_newton needs eps > 0");
  if (bulk.graph.pieces().empty() || boundary.graph.pieces().empty())
    throw std::invalid_argument("model.potential: both potentials must be set");
  if (!bulk.graph.value_at_zero_contains_zero())
    throw std::invalid_argument("model.potential_bulk: graph must satisfy 0 in beta(0)");
  if (!boundary.graph.value_at_zero_contains_zero())
    throw std::invalid_argument("model.potential_boundary: graph must satisfy 0 in beta(0)");
  for (double ts : snapshot_times)
    if (ts < 0.0 || ts > t_final * (1.0 + 1e-9))
      throw std::invalid_argument("snapshots: times must lie in [0, t_final]");
  if (initial_override && !(initial_override->nx == mesh.nx && initial_override->ny == mesh.ny))
    throw std::invalid_argument("initial override: field/mesh shape mismatch");
}

Solver::Solver(SolverConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  auto samples = default_compatibility_samples(cfg_.boundary.graph);
  compat_ = check_compatibility(cfg_.bulk.graph, cfg_.boundary.graph, samples);
  if (!compat_.holds) throw CompatibilityError(compat_);

  asm_ = std::make_unique<Assembly>();
  const StripMesh& m = cfg_.mesh;
  asm_->stiffness = build_stiffness(m, cfg_.nu, true);
  asm_->mass_bulk.resize(m.node_count());
  asm_->mass_gamma = Vec::Zero(m.node_count());
  asm_->xs.resize(m.node_count());
  asm_->ys.resize(m.node_count());
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      int n = m.node(i, j);
      bool bnd = (j == 0 || j == m.ny - 1);
      asm_->mass_bulk[n] = m.hy() * (bnd ? 0.5 : 1.0);
      if (bnd) asm_->mass_gamma[n] = 1.0;
      asm_->xs[n] = m.x(i);
      asm_->ys[n] = m.y(j);
    }
  asm_->eps_gamma = cfg_.eps * compat_.eta;
  asm_->prox_matrix_constant = cfg_.bulk.pi.kind != PerturbationKind::Sine &&
                               cfg_.boundary.pi.kind != PerturbationKind::Sine;
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

double Solver::beta_eps(double r) const { return yosida(cfg_.bulk.graph, cfg_.eps, r); }

double Solver::beta_gamma_eps(double r) const {
  return yosida(cfg_.boundary.graph, asm_->eps_gamma, r);
}

SolverState Solver::initial_state() const {
  const StripMesh& m = cfg_.mesh;
  SolverState s;
  s.t = 0.0;
  s.u = Field(m);
  if (cfg_.initial_override) {
    s.u = *cfg_.initial_override;
  } else {
    for (int j = 0; j < m.ny; ++j)
      for (int i = 0; i < m.nx; ++i) s.u(i, j) = cfg_.initial(m.x(i), m.y(j), 0.0);
  }
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      if (std::isinf(graph_primitive(cfg_.bulk.graph, s.u(i, j))))
        throw std::invalid_argument(
            "initial datum violates the bulk potential barrier (beta_hat(u0) must be finite)");
  for (int j : {0, m.ny - 1})
    for (int i = 0; i < m.nx; ++i)
      if (std::isinf(graph_primitive(cfg_.boundary.graph, s.u(i, j))))
        throw std::invalid_argument(
            "initial trace violates the boundary potential barrier");

  s.xi = Field(m);
  s.xi_gamma_bottom.assign(m.nx, 0.0);
  s.xi_gamma_top.assign(m.nx, 0.0);
  bool reg = cfg_.scheme == Scheme::RegularizedNewton;
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      s.xi(i, j) = reg ? beta_eps(s.u(i, j)) : minimal_section(cfg_.bulk.graph, s.u(i, j));
  for (int i = 0; i < m.nx; ++i) {
    s.xi_gamma_bottom[i] = reg ? beta_gamma_eps(s.u(i, 0))
                               : minimal_section(cfg_.boundary.graph, s.u(i, 0));
    s.xi_gamma_top[i] = reg ? beta_gamma_eps(s.u(i, m.ny - 1))
                            : minimal_section(cfg_.boundary.graph, s.u(i, m.ny - 1));
  }
  return s;
}

SolverState Solver::step(const SolverState& s) const {
  return cfg_.scheme == Scheme::RegularizedNewton ? step_regularized(s) : step_prox(s);
}

SolverState Solver::step_regularized(const SolverState& s) const {
  const StripMesh& m = cfg_.mesh;
  const int n = m.node_count();
  const double t_new = s.t + cfg_.dt;
  const double idt = 1.0 / cfg_.dt;

  Vec un = Eigen::Map<const Vec>(s.u.v.data(), n);
  Vec fb(n), fg = Vec::Zero(n);
  for (int k = 0; k < n; ++k) fb[k] = cfg_.forcing_bulk(asm_->xs[k], asm_->ys[k], t_new);
  for (int j : {0, m.ny - 1})
    for (int i = 0; i < m.nx; ++i) {
      int k = m.node(i, j);
      fg[k] = cfg_.forcing_boundary(asm_->xs[k], asm_->ys[k], t_new);
    }

  auto nl = [&](const Vec& w, Vec& val, Vec& slope) {
    for (int k = 0; k < n; ++k) {
      double wb = w[k];
      double mb = asm_->mass_bulk[k];
      double v = mb * ((wb - un[k]) * idt + beta_eps(wb) + cfg_.bulk.pi(wb) - fb[k]);
      double sl = mb * (idt + yosida_slope(cfg_.bulk.graph, cfg_.eps, wb) +
                        cfg_.bulk.pi.slope(wb));
      double mg = asm_->mass_gamma[k];
      if (mg != 0.0) {
        v += mg * ((wb - un[k]) * idt + beta_gamma_eps(wb) + cfg_.boundary.pi(wb) - fg[k]);
        sl += mg * (idt + yosida_slope(cfg_.boundary.graph, asm_->eps_gamma, wb) +
                    cfg_.boundary.pi.slope(wb));
      }
      val[k] = v;
      slope[k] = sl;
    }
  };

  Vec scale = asm_->mass_bulk + asm_->mass_gamma;
  Vec w = newton_solve(asm_->stiffness, nl, un, scale, t_new, "step_regularized");

  SolverState out;
  out.t = t_new;
  out.u = Field(m);
  Eigen::Map<Vec>(out.u.v.data(), n) = w;
  out.xi = Field(m);
  for (int k = 0; k < n; ++k) out.xi.v[k] = beta_eps(w[k]);
  out.xi_gamma_bottom.resize(m.nx);
  out.xi_gamma_top.resize(m.nx);
  for (int i = 0; i < m.nx; ++i) {
    out.xi_gamma_bottom[i] = beta_gamma_eps(out.u(i, 0));
    out.xi_gamma_top[i] = beta_gamma_eps(out.u(i, m.ny - 1));
  }
  return out;
}

SolverState Solver::step_prox(const SolverState& s) const {
  const StripMesh& m = cfg_.mesh;
  const int n = m.node_count();
  const double t_new = s.t + cfg_.dt;
  const double idt = 1.0 / cfg_.dt;

  // substep A: implicit diffusion with the perturbations linearized at u^n
  Vec rhs(n);
  Vec diag(n);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      int k = m.node(i, j);
      double u0 = s.u.v[k];
      double mb = asm_->mass_bulk[k];
      double mg = asm_->mass_gamma[k];
      double pb = cfg_.bulk.pi(u0), pbs = cfg_.bulk.pi.slope(u0);
      double fb = cfg_.forcing_bulk(asm_->xs[k], asm_->ys[k], t_new);
      diag[k] = (mb + mg) * idt + mb * pbs;
      rhs[k] = (mb + mg) * idt * u0 + mb * (fb - pb + pbs * u0);
      if (mg != 0.0) {
        double pg = cfg_.boundary.pi(u0), pgs = cfg_.boundary.pi.slope(u0);
        double fg = cfg_.forcing_boundary(asm_->xs[k], asm_->ys[k], t_new);
        diag[k] += mg * pgs;
        rhs[k] += mg * (fg - pg + pgs * u0);
      }
    }

  Vec ustar(n);
  if (n > kDirectLimit) {
    SpMat a = asm_->stiffness;
    for (int k = 0; k < n; ++k) a.coeffRef(k, k) += diag[k];
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(20000);
    cg.compute(a);
    ustar = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
      throw SolverError("step_prox: conjugate-gradient residual stagnation");
  } else {
    if (!asm_->prox_fact || !asm_->prox_matrix_constant) {
      SpMat a = asm_->stiffness;
      for (int k = 0; k < n; ++k) a.coeffRef(k, k) += diag[k];
      auto fact = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
      fact->compute(a);
      if (fact->info() != Eigen::Success)
        throw SolverError("step_prox: sparse factorization failed");
      asm_->prox_fact = std::move(fact);
    }
    ustar = asm_->prox_fact->solve(rhs);
    if (asm_->prox_fact->info() != Eigen::Success)
      throw SolverError("step_prox: linear solve breakdown");
  }

  // substep B: pointwise resolvents; the quotient is an exact selection
  SolverState out;
  out.t = t_new;
  out.u = Field(m);
  out.xi = Field(m);
  out.xi_gamma_bottom.resize(m.nx);
  out.xi_gamma_top.resize(m.nx);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      int k = m.node(i, j);
      if (j == 0 || j == m.ny - 1) {
        double w = resolvent(cfg_.boundary.graph, cfg_.dt, ustar[k]);
        double sel = (ustar[k] - w) * idt;
        out.u.v[k] = w;
        (j == 0 ? out.xi_gamma_bottom[i] : out.xi_gamma_top[i]) = sel;
        out.xi.v[k] = minimal_section(cfg_.bulk.graph, w);
      } else {
        double w = resolvent(cfg_.bulk.graph, cfg_.dt, ustar[k]);
        out.u.v[k] = w;
        out.xi.v[k] = (ustar[k] - w) * idt;
      }
    }
  return out;
}

EnergyBreakdown Solver::energy(const SolverState& s) const {
  const StripMesh& m = cfg_.mesh;
  const bool reg = cfg_.eps > 0.0;
  EnergyBreakdown e;
  e.bulk_grad = 0.5 * grad_form(m, s.u, s.u);
  e.boundary_grad = 0.5 * cfg_.nu * boundary_grad_form(m, s.u, s.u);
  long double bb = 0.0L, bp = 0.0L, gb = 0.0L, gp = 0.0L;
  for (int j = 0; j < m.ny; ++j) {
    double w = (j == 0 || j == m.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i < m.nx; ++i) {
      double u = s.u(i, j);
      double bhat = reg ? moreau_primitive(cfg_.bulk.graph, cfg_.eps, u)
                        : graph_primitive(cfg_.bulk.graph, u);
      bb += w * bhat;
      bp += w * cfg_.bulk.pi.primitive(u);
    }
  }
  for (int j : {0, m.ny - 1})
    for (int i = 0; i < m.nx; ++i) {
      double v = s.u(i, j);
      double bhat = reg ? moreau_primitive(cfg_.boundary.graph, asm_->eps_gamma, v)
                        : graph_primitive(cfg_.boundary.graph, v);
      gb += bhat;
      gp += cfg_.boundary.pi.primitive(v);
    }
  e.bulk_beta = (double)bb * m.hx() * m.hy();
  e.bulk_pi = (double)bp * m.hx() * m.hy();
  e.boundary_beta = (double)gb * m.hx();
  e.boundary_pi = (double)gp * m.hx();
  return e;
}

Trajectory Solver::run() const {
  const StripMesh& m = cfg_.mesh;
  const int nsteps = cfg_.step_count();
  Trajectory traj;

  // snapshot step indices, clamped into the run
  std::vector<std::pair<int, double>> snap_at;
  for (double ts : cfg_.snapshot_times) {
    int k = (int)std::clamp<long long>(std::llround(ts / cfg_.dt), 0, nsteps);
    snap_at.push_back({k, ts});
  }

  const bool zero_forcing = cfg_.forcing_bulk.is_zero() && cfg_.forcing_boundary.is_zero();
  const bool gronwall_applies =
      zero_forcing && cfg_.bulk.pi(0.0) == 0.0 && cfg_.boundary.pi(0.0) == 0.0;
  const double gronwall_rate =
      2.0 * std::max(cfg_.bulk.pi.lipschitz(), cfg_.boundary.pi.lipschitz()) + 1.0;

  SolverState state = initial_state();

  auto membership = [&](const SolverState& st) {
    double worst = 0.0;
    const bool reg = cfg_.scheme == Scheme::RegularizedNewton;
    for (int j = 0; j < m.ny; ++j)
      for (int i = 0; i < m.nx; ++i) {
        double d = reg ? std::fabs(st.xi(i, j) - beta_eps(st.u(i, j)))
                       : vertical_distance(cfg_.bulk.graph, st.u(i, j), st.xi(i, j));
        worst = std::max(worst, d);
      }
    for (int i = 0; i < m.nx; ++i) {
      double db = reg ? std::fabs(st.xi_gamma_bottom[i] - beta_gamma_eps(st.u(i, 0)))
                      : vertical_distance(cfg_.boundary.graph, st.u(i, 0),
                                          st.xi_gamma_bottom[i]);
      double dt2 = reg ? std::fabs(st.xi_gamma_top[i] - beta_gamma_eps(st.u(i, m.ny - 1)))
                       : vertical_distance(cfg_.boundary.graph, st.u(i, m.ny - 1),
                                           st.xi_gamma_top[i]);
      worst = std::max({worst, db, dt2});
    }
    return worst;
  };

  auto record = [&](const SolverState& st) {
    StepRecord r;
    r.t = st.t;
    r.energy = energy(st);
    r.norm = norms(m, st.u);
    r.membership_violation = membership(st);
    traj.records.push_back(r);
  };

  record(state);
  if (cfg_.keep_fields) traj.fields.push_back(state.u);
  for (auto& [k, ts] : snap_at)
    if (k == 0) traj.snapshots.push_back({0.0, state.u});

  double phi0 = 0.0;
  if (gronwall_applies) {
    phi0 = inner_bulk(m, state.u, state.u) + inner_boundary(m, state.u, state.u);
  }

  for (int step_idx = 1; step_idx <= nsteps; ++step_idx) {
    SolverState next = step(state);

    Field diff(m);
    for (int k = 0; k < m.node_count(); ++k)
      diff.v[k] = (next.u.v[k] - state.u.v[k]) / cfg_.dt;
    traj.time_integral_dtu_sq +=
        cfg_.dt * (inner_bulk(m, diff, diff) + inner_boundary(m, diff, diff));

    record(next);
    const auto& prev_rec = traj.records[traj.records.size() - 2];
    const auto& cur_rec = traj.records.back();
    traj.max_energy_increase = std::max(
        traj.max_energy_increase, cur_rec.energy.total() - prev_rec.energy.total());

    if (gronwall_applies && phi0 > 0.0) {
      double phi = inner_bulk(m, next.u, next.u) + inner_boundary(m, next.u, next.u);
      double envelope = std::exp(gronwall_rate * next.t);
      double ratio = phi / (phi0 * envelope);
      traj.gronwall_max_ratio = std::max(traj.gronwall_max_ratio, ratio);
      if (ratio > 1.0 + 1e-9) traj.gronwall_ok = false;
    }

    if (cfg_.keep_fields) traj.fields.push_back(next.u);
    for (auto& [k, ts] : snap_at)
      if (k == step_idx) traj.snapshots.push_back({next.t, next.u});

    state = std::move(next);
  }
  return traj;
}

SelectionDiagnostic Solver::recover_selection(const SolverState& before,
                                              const SolverState& after) const {
  const StripMesh& m = cfg_.mesh;
  const double idt = 1.0 / cfg_.dt;
  const double t_new = after.t;
  const bool reg = cfg_.scheme == Scheme::RegularizedNewton;

  SelectionDiagnostic d;
  d.xi = Field(m);
  d.xi_gamma_bottom.assign(m.nx, 0.0);
  d.xi_gamma_top.assign(m.nx, 0.0);

  Field lap = laplacian(m, after.u);
  for (int j = 1; j < m.ny - 1; ++j)
    for (int i = 0; i < m.nx; ++i) {
      double w = after.u(i, j);
      double f = cfg_.forcing_bulk(m.x(i), m.y(j), t_new);
      d.xi(i, j) = f - (w - before.u(i, j)) * idt + lap(i, j) - cfg_.bulk.pi(w);
      double dist = reg ? std::fabs(d.xi(i, j) - beta_eps(w))
                        : vertical_distance(cfg_.bulk.graph, w, d.xi(i, j));
      d.max_distance_bulk = std::max(d.max_distance_bulk, dist);
    }

  for (auto side : {Side::Bottom, Side::Top}) {
    int j = (side == Side::Bottom) ? 0 : m.ny - 1;
    auto flux = sbp_normal_flux(m, after.u, side);
    auto row = after.u.row(j);
    auto lb = laplace_beltrami(m, row);
    auto& out = (side == Side::Bottom) ? d.xi_gamma_bottom : d.xi_gamma_top;
    for (int i = 0; i < m.nx; ++i) {
      double v = after.u(i, j);
      double fb = cfg_.forcing_bulk(m.x(i), m.y(j), t_new);
      double fg = cfg_.forcing_boundary(m.x(i), m.y(j), t_new);
      // the assembly's effective flux includes the half-cell bulk residual
      double half_cell = 0.5 * m.hy() *
                         ((v - before.u(i, j)) * idt + after.xi(i, j) +
                          cfg_.bulk.pi(v) - fb);
      double flux_eff = flux[i] + half_cell;
      out[i] = fg - (v - before.u(i, j)) * idt + cfg_.nu * lb[i] -
               cfg_.boundary.pi(v) - flux_eff;
      double dist = reg ? std::fabs(out[i] - beta_gamma_eps(v))
                        : vertical_distance(cfg_.boundary.graph, v, out[i]);
      d.max_distance_boundary = std::max(d.max_distance_boundary, dist);
    }
  }
  return d;
}

Field Solver::mollify_initial(const StripMesh& mesh, const Field& u0, double nu,
                              const ScalarGraph& beta_gamma) {
  if (!(nu > 0.0)) throw std::invalid_argument("mollify_initial: nu must be > 0");
  if (!u0.conforms(mesh))
    throw std::invalid_argument("mollify_initial: field/mesh shape mismatch");
  const int n = mesh.node_count();
  const double eps_reg = 1e-8;

  SpMat a = build_stiffness(mesh, 0.0, false) * nu;
  Vec mb(n), mg = Vec::Zero(n);
  for (int j = 0; j < mesh.ny; ++j)
    for (int i = 0; i < mesh.nx; ++i) {
      int k = mesh.node(i, j);
      bool bnd = (j == 0 || j == mesh.ny - 1);
      mb[k] = mesh.hy() * (bnd ? 0.5 : 1.0);
      if (bnd) mg[k] = 1.0;
    }
  Vec u0v = Eigen::Map<const Vec>(u0.v.data(), n);

  auto nl = [&](const Vec& w, Vec& val, Vec& slope) {
    for (int k = 0; k < n; ++k) {
      val[k] = mb[k] * (w[k] - u0v[k]);
      slope[k] = mb[k];
      if (mg[k] != 0.0) {
        val[k] += nu * mg[k] * yosida(beta_gamma, eps_reg, w[k]);
        slope[k] += nu * mg[k] * yosida_slope(beta_gamma, eps_reg, w[k]);
      }
    }
  };
  Vec w = newton_solve(a, nl, u0v, mb, 0.0, "mollify_initial");
  Field out(mesh);
  Eigen::Map<Vec>(out.v.data(), n) = w;
  return out;
}

}  // namespace acdb
