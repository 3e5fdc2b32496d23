#include "acdb/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace acdb {

using nlohmann::json;

namespace {

double number_at(const json& j, const std::string& path, double fallback) {
  const json* cur = &j;
  std::istringstream is(path);
  std::string part;
  while (std::getline(is, part, '.')) {
    if (!cur->is_object() || !cur->contains(part)) return fallback;
    cur = &(*cur)[part];
  }
  if (cur->is_string()) {
    std::string s = cur->get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ConfigError(path, "expected a number");
  }
  if (!cur->is_number()) throw ConfigError(path, "expected a number");
  return cur->get<double>();
}

double number_field(const json& j, const std::string& parent, const std::string& key,
                    double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  if (!v.is_number() && !v.is_string())
    throw ConfigError(parent + "." + key, "expected a number");
  if (v.is_string()) throw ConfigError(parent + "." + key, "expected a number");
  return v.get<double>();
}

std::string string_field(const json& j, const std::string& parent, const std::string& key,
                         const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError(parent + "." + key, "expected a string");
  return j[key].get<std::string>();
}

bool bool_field(const json& j, const std::string& parent, const std::string& key,
                bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError(parent + "." + key, "expected a boolean");
  return j[key].get<bool>();
}

json echo_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

// ---- closed forms -------------------------------------------------------

SpaceTimeFn parse_form(const json& j, const std::string& path, const StripMesh& mesh,
                       json& echo) {
  if (j.is_null()) {
    echo = {{"kind", "zero"}};
    return SpaceTimeFn::zero();
  }
  if (!j.is_object()) throw ConfigError(path, "expected an object with a 'kind'");
  std::string kind = string_field(j, path, "kind", "zero");
  double amp = number_field(j, path, "amplitude", 0.0);
  echo = {{"kind", kind}};
  if (kind == "zero") return SpaceTimeFn::zero();
  echo["amplitude"] = amp;
  if (kind == "constant") return SpaceTimeFn::constant(amp);
  if (kind == "cos_x") {
    double mode = number_field(j, path, "mode", 1.0);
    double phase = number_field(j, path, "phase", 0.0);
    echo["mode"] = mode;
    echo["phase"] = phase;
    return SpaceTimeFn::cos_x(amp, 2.0 * std::numbers::pi * mode / mesh.lx, phase);
  }
  if (kind == "mixed_modes") {
    return SpaceTimeFn::mixed_modes(amp, 2.0 * std::numbers::pi / mesh.lx, mesh.ly);
  }
  if (kind == "mms_solution") {
    double phase = number_field(j, path, "phase", 0.0);
    echo["phase"] = phase;
    ManufacturedSolution ms;
    ms.amplitude = amp != 0.0 ? amp : 0.9;
    echo["amplitude"] = ms.amplitude;
    ms.wavenumber = 2.0 * std::numbers::pi / mesh.lx;
    ms.phase = phase;
    ms.ly = mesh.ly;
    return ms.solution();
  }
  throw ConfigError(path + ".kind", "unknown closed form '" + kind + "'");
}

// ---- potentials ---------------------------------------------------------

Perturbation parse_pi(const json& j, const std::string& path) {
  std::string kind = string_field(j, path, "kind", "zero");
  double coeff = number_field(j, path, "coeff", 0.0);
  if (kind == "zero") return {PerturbationKind::Zero, 0.0};
  if (kind == "linear") return {PerturbationKind::Linear, coeff};
  if (kind == "sine") return {PerturbationKind::Sine, coeff};
  throw ConfigError(path + ".kind", "unknown perturbation '" + kind + "'");
}

json echo_pi(const Perturbation& p) {
  switch (p.kind) {
    case PerturbationKind::Zero:
      return {{"kind", "zero"}};
    case PerturbationKind::Linear:
      return {{"kind", "linear"}, {"coeff", p.coeff}};
    case PerturbationKind::Sine:
      return {{"kind", "sine"}, {"coeff", p.coeff}};
  }
  return {};
}

BranchKind parse_branch_kind(const std::string& s, const std::string& path) {
  if (s == "constant") return BranchKind::Constant;
  if (s == "linear") return BranchKind::Linear;
  if (s == "cubic") return BranchKind::Cubic;
  if (s == "power") return BranchKind::Power;
  if (s == "log_ratio") return BranchKind::LogRatio;
  throw ConfigError(path, "unknown branch kind '" + s + "'");
}

const char* branch_kind_name(BranchKind k) {
  switch (k) {
    case BranchKind::Constant:
      return "constant";
    case BranchKind::Linear:
      return "linear";
    case BranchKind::Cubic:
      return "cubic";
    case BranchKind::Power:
      return "power";
    case BranchKind::LogRatio:
      return "log_ratio";
  }
  return "?";
}

PotentialPair parse_custom_potential(const std::string& name, const json& j,
                                     const std::string& path) {
  if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty())
    throw ConfigError(path + ".pieces", "expected a non-empty array");
  std::vector<Piece> pieces;
  int idx = 0;
  for (const json& pj : j["pieces"]) {
    std::string ppath = path + ".pieces[" + std::to_string(idx++) + "]";
    std::string type = string_field(pj, ppath, "type", "branch");
    if (type == "segment") {
      SegmentPiece s;
      s.at = number_field(pj, ppath, "at", 0.0);
      s.lo = number_field(pj, ppath, "lo", -kInf);
      s.hi = number_field(pj, ppath, "hi", kInf);
      pieces.push_back(s);
    } else if (type == "branch") {
      BranchPiece b;
      b.span.lo = number_field(pj, ppath, "from", -kInf);
      b.span.hi = number_field(pj, ppath, "to", kInf);
      b.span.lo_closed = bool_field(pj, ppath, "from_closed", false);
      b.span.hi_closed = bool_field(pj, ppath, "to_closed", false);
      b.f.kind = parse_branch_kind(string_field(pj, ppath, "kind", "linear"),
                                   ppath + ".kind");
      b.f.scale = number_field(pj, ppath, "scale", 1.0);
      b.f.offset = number_field(pj, ppath, "offset", 0.0);
      b.f.exponent = number_field(pj, ppath, "exponent", 1.0);
      pieces.push_back(b);
    } else {
      throw ConfigError(ppath + ".type", "expected 'branch' or 'segment'");
    }
  }
  PotentialPair p;
  p.name = name;
  try {
    p.graph = ScalarGraph::from_pieces(std::move(pieces));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".pieces", e.what());
  }
  p.pi = j.contains("pi") ? parse_pi(j["pi"], path + ".pi") : Perturbation{};
  return p;
}

json echo_potential(const PotentialPair& p, bool custom) {
  if (!custom) return p.name;
  json out;
  out["pi"] = echo_pi(p.pi);
  json pieces = json::array();
  for (const Piece& piece : p.graph.pieces()) {
    if (auto* bp = std::get_if<BranchPiece>(&piece)) {
      pieces.push_back({{"type", "branch"},
                        {"kind", branch_kind_name(bp->f.kind)},
                        {"from", echo_number(bp->span.lo)},
                        {"to", echo_number(bp->span.hi)},
                        {"from_closed", bp->span.lo_closed},
                        {"to_closed", bp->span.hi_closed},
                        {"scale", bp->f.scale},
                        {"offset", bp->f.offset},
                        {"exponent", bp->f.exponent}});
    } else {
      const auto& s = std::get<SegmentPiece>(piece);
      pieces.push_back({{"type", "segment"},
                        {"at", s.at},
                        {"lo", echo_number(s.lo)},
                        {"hi", echo_number(s.hi)}});
    }
  }
  out["pieces"] = pieces;
  return out;
}

PotentialPair resolve_potential(const std::string& name, const json& root,
                                const std::string& path) {
  if (root.contains("potentials") && root["potentials"].contains(name))
    return parse_custom_potential(name, root["potentials"][name], "potentials." + name);
  try {
    return catalog(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError(path, "unknown potential '" + name +
                                "' (not in the catalog, not under 'potentials')");
  }
}

}  // namespace

ResolvedConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("document", e.what());
  }
  if (!root.is_object()) throw ConfigError("document", "top level must be an object");

  ResolvedConfig rc;
  SolverConfig& c = rc.solver;
  json echo;

  c.mesh.nx = (int)number_at(root, "mesh.nx", 64);
  c.mesh.ny = (int)number_at(root, "mesh.ny", 64);
  c.mesh.lx = number_at(root, "mesh.lx", 1.0);
  c.mesh.ly = number_at(root, "mesh.ly", 1.0);
  echo["mesh"] = {{"nx", c.mesh.nx}, {"ny", c.mesh.ny}, {"lx", c.mesh.lx}, {"ly", c.mesh.ly}};

  c.dt = number_at(root, "time.dt", 1e-3);
  c.t_final = number_at(root, "time.t_final", 0.1);
  echo["time"] = {{"dt", c.dt}, {"t_final", c.t_final}};

  const json model = root.contains("model") ? root["model"] : json::object();
  c.nu = number_field(model, "model", "nu", 1.0);
  c.eps = number_field(model, "model", "eps", 1e-3);
  std::string scheme = string_field(model, "model", "scheme", "regularized_newton");
  if (scheme == "regularized_newton")
    c.scheme = Scheme::RegularizedNewton;
  else if (scheme == "prox_splitting")
    c.scheme = Scheme::ProxSplitting;
  else
    throw ConfigError("model.scheme", "expected 'regularized_newton' or 'prox_splitting'");

  std::string pot = string_field(model, "model", "potential", "double_well");
  std::string pot_bulk = string_field(model, "model", "potential_bulk", pot);
  std::string pot_bnd = string_field(model, "model", "potential_boundary", pot_bulk);
  c.bulk = resolve_potential(pot_bulk, root, "model.potential_bulk");
  c.boundary = resolve_potential(pot_bnd, root, "model.potential_boundary");

  json fecho;
  c.forcing_bulk = parse_form(model.contains("forcing_bulk") ? model["forcing_bulk"] : json(),
                              "model.forcing_bulk", c.mesh, fecho);
  json fecho2;
  c.forcing_boundary =
      parse_form(model.contains("forcing_boundary") ? model["forcing_boundary"] : json(),
                 "model.forcing_boundary", c.mesh, fecho2);
  json iecho;
  c.initial = parse_form(model.contains("initial") ? model["initial"] : json(),
                         "model.initial", c.mesh, iecho);

  echo["model"] = {{"nu", c.nu},
                   {"eps", c.eps},
                   {"scheme", scheme},
                   {"potential_bulk", pot_bulk},
                   {"potential_boundary", pot_bnd},
                   {"forcing_bulk", fecho},
                   {"forcing_boundary", fecho2},
                   {"initial", iecho}};
  bool bulk_custom = root.contains("potentials") && root["potentials"].contains(pot_bulk);
  bool bnd_custom = root.contains("potentials") && root["potentials"].contains(pot_bnd);
  if (bulk_custom || bnd_custom) {
    json pots = json::object();
    if (bulk_custom) pots[pot_bulk] = echo_potential(c.bulk, true);
    if (bnd_custom) pots[pot_bnd] = echo_potential(c.boundary, true);
    echo["potentials"] = pots;
  }

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config", e.what());
  }

  // experiment parameters, all defaulted
  ExperimentParams& ex = rc.experiment;
  const json exj = root.contains("experiment") ? root["experiment"] : json::object();
  json exe;
  if (exj.contains("contdep")) {
    const json& cd = exj["contdep"];
    std::string datum = string_field(cd, "experiment.contdep", "datum", "initial_data");
    if (datum == "initial_data")
      ex.contdep_spec.datum = PerturbationSpec::Datum::InitialData;
    else if (datum == "forcing_bulk")
      ex.contdep_spec.datum = PerturbationSpec::Datum::ForcingBulk;
    else if (datum == "forcing_boundary")
      ex.contdep_spec.datum = PerturbationSpec::Datum::ForcingBoundary;
    else
      throw ConfigError("experiment.contdep.datum", "unknown datum '" + datum + "'");
    json secho;
    ex.contdep_spec.shape = cd.contains("shape")
                                ? parse_form(cd["shape"], "experiment.contdep.shape",
                                             c.mesh, secho)
                                : SpaceTimeFn::constant(1.0);
    if (!cd.contains("shape")) secho = {{"kind", "constant"}, {"amplitude", 1.0}};
    if (cd.contains("amplitudes")) {
      ex.amplitudes.clear();
      for (const json& a : cd["amplitudes"]) ex.amplitudes.push_back(a.get<double>());
    }
    exe["contdep"] = {{"datum", datum}, {"shape", secho}, {"amplitudes", ex.amplitudes}};
  }
  if (exj.contains("eps_sweep") && exj["eps_sweep"].contains("eps_list")) {
    ex.eps_list.clear();
    for (const json& a : exj["eps_sweep"]["eps_list"]) ex.eps_list.push_back(a.get<double>());
  }
  exe["eps_sweep"] = {{"eps_list", ex.eps_list}};
  if (exj.contains("nu_sweep") && exj["nu_sweep"].contains("nu_list")) {
    ex.nu_list.clear();
    for (const json& a : exj["nu_sweep"]["nu_list"]) ex.nu_list.push_back(a.get<double>());
  }
  exe["nu_sweep"] = {{"nu_list", ex.nu_list}};
  if (exj.contains("mms")) {
    const json& mm = exj["mms"];
    if (mm.contains("levels")) {
      ex.levels.clear();
      int idx = 0;
      for (const json& l : mm["levels"]) {
        std::string lp = "experiment.mms.levels[" + std::to_string(idx++) + "]";
        if (!l.is_array() || l.size() != 3)
          throw ConfigError(lp, "expected [nx, ny, dt]");
        ex.levels.push_back({l[0].get<int>(), l[1].get<int>(), l[2].get<double>()});
      }
    }
    if (mm.contains("temporal_dts")) {
      ex.temporal_dts.clear();
      for (const json& a : mm["temporal_dts"]) ex.temporal_dts.push_back(a.get<double>());
    }
    ex.x_phase = number_field(mm, "experiment.mms", "x_phase", 0.0);
  }
  json lv = json::array();
  for (const MmsLevel& l : ex.levels) lv.push_back({l.nx, l.ny, l.dt});
  exe["mms"] = {{"levels", lv}, {"temporal_dts", ex.temporal_dts}, {"x_phase", ex.x_phase}};
  echo["experiment"] = exe;

  rc.echo = echo.dump(2);
  return rc;
}

ResolvedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace acdb
