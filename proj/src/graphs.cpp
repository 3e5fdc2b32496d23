#include "acdb/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace acdb {

namespace {

long double base_value(const Branch& b, long double y) {
  switch (b.kind) {
    case BranchKind::Constant:
      return 0.0L;
    case BranchKind::Linear:
      return y;
    case BranchKind::Cubic:
      return y * y * y;
    case BranchKind::Power: {
      long double a = std::fabs(y);
      long double v = std::pow(a, (long double)b.exponent);
      return y < 0 ? -v : v;
    }
    case BranchKind::LogRatio:
      return std::log((1.0L + y) / (1.0L - y));
  }
  return 0.0L;
}

long double base_slope(const Branch& b, long double y) {
  switch (b.kind) {
    case BranchKind::Constant:
      return 0.0L;
    case BranchKind::Linear:
      return 1.0L;
    case BranchKind::Cubic:
      return 3.0L * y * y;
    case BranchKind::Power: {
      long double a = std::fabs(y);
      long double p = b.exponent;
      if (a == 0.0L) return p > 1.0L ? 0.0L : (p == 1.0L ? 1.0L : kInf);
      return p * std::pow(a, p - 1.0L);
    }
    case BranchKind::LogRatio:
      return 2.0L / ((1.0L + y) * (1.0L - y));
  }
  return 0.0L;
}

long double base_primitive(const Branch& b, long double y) {
  switch (b.kind) {
    case BranchKind::Constant:
      return 0.0L;
    case BranchKind::Linear:
      return 0.5L * y * y;
    case BranchKind::Cubic:
      return 0.25L * y * y * y * y;
    case BranchKind::Power: {
      long double a = std::fabs(y);
      long double p = b.exponent;
      return std::pow(a, p + 1.0L) / (p + 1.0L);
    }
    case BranchKind::LogRatio: {
      auto xlogx = [](long double u) { return u > 0.0L ? u * std::log(u) : 0.0L; };
      return xlogx(1.0L + y) + xlogx(1.0L - y);
    }
  }
  return 0.0L;
}

double piece_x_start(const Piece& p) {
  if (auto* bp = std::get_if<BranchPiece>(&p)) return bp->span.lo;
  return std::get<SegmentPiece>(p).at;
}

double piece_x_end(const Piece& p) {
  if (auto* bp = std::get_if<BranchPiece>(&p)) return bp->span.hi;
  return std::get<SegmentPiece>(p).at;
}

bool closed_at_start(const Piece& p) {
  if (auto* bp = std::get_if<BranchPiece>(&p)) return bp->span.lo_closed;
  return true;
}

bool closed_at_end(const Piece& p) {
  if (auto* bp = std::get_if<BranchPiece>(&p)) return bp->span.hi_closed;
  return true;
}

// Values of the piece at the junction point p: sup when approached from the
// left, inf from the right.
double junction_sup(const Piece& piece, double p) {
  if (auto* bp = std::get_if<BranchPiece>(&piece)) return bp->f.value(p);
  return std::get<SegmentPiece>(piece).hi;
}

double junction_inf(const Piece& piece, double p) {
  if (auto* bp = std::get_if<BranchPiece>(&piece)) return bp->f.value(p);
  return std::get<SegmentPiece>(piece).lo;
}

bool about_equal(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Safeguarded solve of y + k*y^3 = t, k >= 0, in long double. Monotone with
// derivative >= 1, so plain Newton from the far end converges; folded to
// t >= 0 by oddness.
long double solve_cubic_resolvent(long double k, long double t) {
  if (t == 0.0L || k == 0.0L) return t;
  long double sign = t < 0 ? -1.0L : 1.0L;
  long double tt = sign * t;
  long double y = tt < 1.0L ? tt / (1.0L + k * tt * tt) : std::cbrt(tt / k);
  if (y > tt) y = tt;
  for (int i = 0; i < 80; ++i) {
    long double phi = y + k * y * y * y - tt;
    long double dphi = 1.0L + 3.0L * k * y * y;
    long double step = phi / dphi;
    y -= step;
    if (y < 0.0L) y = 0.0L;
    if (std::fabs(step) <= 1e-19L * (1.0L + std::fabs(y))) break;
  }
  return sign * y;
}

// Safeguarded bisection+Newton for y + k*base(y) = t on a bracket where the
// equation changes sign. Endpoints are never evaluated, so asymptotic
// branches (log_ratio at +-1) bisect down to the representable root.
long double solve_branch_numeric(const Branch& f, long double k, long double t,
                                 long double lo, long double hi) {
  auto psi = [&](long double y) { return y + k * base_value(f, y) - t; };
  long double y = 0.5L * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    long double v = psi(y);
    if (v == 0.0L) return y;
    if (v > 0.0L)
      hi = y;
    else
      lo = y;
    long double dv = 1.0L + k * base_slope(f, y);
    long double yn = y - v / dv;
    if (!std::isfinite((double)yn) || !(yn > lo && yn < hi)) yn = 0.5L * (lo + hi);
    if (std::fabs(yn - y) <= 1e-19L * (1.0L + std::fabs(yn))) return yn;
    y = yn;
  }
  return y;  // bracket collapsed to rounding width
}

// Unique y in [span] with y + lambda*f(y) = r, assuming r lies in the piece
// image.
double solve_branch(const Branch& f, const Interval& span, double lambda, double r) {
  long double lam = lambda;
  long double t = (long double)r - lam * (long double)f.offset;
  long double k = lam * (long double)f.scale;
  long double y = 0.0L;
  switch (f.kind) {
    case BranchKind::Constant:
      y = t;
      break;
    case BranchKind::Linear:
      y = t / (1.0L + k);
      break;
    case BranchKind::Cubic:
      y = solve_cubic_resolvent(k, t);
      break;
    case BranchKind::Power:
    case BranchKind::LogRatio: {
      long double lo = std::isfinite(span.lo) ? (long double)span.lo
                                              : std::min(0.0L, t) - 1.0L;
      long double hi = std::isfinite(span.hi) ? (long double)span.hi
                                              : std::max(0.0L, t) + 1.0L;
      y = solve_branch_numeric(f, k, t, lo, hi);
      break;
    }
  }
  double yd = (double)y;
  if (yd < span.lo) yd = span.lo;
  if (yd > span.hi) yd = span.hi;
  return yd;
}

struct ResolventHit {
  const Piece* piece = nullptr;
  double y = 0.0;
};

ResolventHit resolve_hit(const ScalarGraph& g, double lambda, double r) {
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent: lambda must be > 0");
  const auto& pieces = g.pieces();
  long double lr = r;
  // images of the pieces tile the range of I + lambda*beta in order
  for (std::size_t idx = 0; idx < pieces.size(); ++idx) {
    const Piece& p = pieces[idx];
    long double img_lo, img_hi;
    if (auto* bp = std::get_if<BranchPiece>(&p)) {
      img_lo = std::isfinite(bp->span.lo)
                   ? bp->span.lo + (long double)lambda * bp->f.value(bp->span.lo)
                   : -kInf;
      img_hi = std::isfinite(bp->span.hi)
                   ? bp->span.hi + (long double)lambda * bp->f.value(bp->span.hi)
                   : kInf;
    } else {
      const auto& s = std::get<SegmentPiece>(p);
      img_lo = s.at + (long double)lambda * s.lo;
      img_hi = s.at + (long double)lambda * s.hi;
    }
    if (idx == 0 && lr < img_lo)
      throw std::domain_error("resolvent: argument below the range of I + lambda*beta "
                              "(graph is not maximal)");
    if (lr <= img_hi || idx + 1 == pieces.size()) {
      if (idx + 1 == pieces.size() && lr > img_hi)
        throw std::domain_error("resolvent: argument above the range of I + lambda*beta "
                                "(graph is not maximal)");
      if (auto* bp = std::get_if<BranchPiece>(&p))
        return {&p, solve_branch(bp->f, bp->span, lambda, r)};
      return {&p, std::get<SegmentPiece>(p).at};
    }
  }
  throw std::domain_error("resolvent: empty graph");
}

}  // namespace

double Branch::value(double y) const {
  return offset + scale * (double)base_value(*this, (long double)y);
}

double Branch::slope(double y) const {
  return scale * (double)base_slope(*this, (long double)y);
}

double Branch::primitive(double y) const {
  return (double)((long double)offset * y +
                  (long double)scale * base_primitive(*this, (long double)y));
}

bool Interval::contains_interval(const Interval& other) const {
  if (other.lo < lo) return false;
  if (other.lo == lo && other.lo_closed && !lo_closed) return false;
  if (other.hi > hi) return false;
  if (other.hi == hi && other.hi_closed && !hi_closed) return false;
  return true;
}

ScalarGraph ScalarGraph::from_pieces(std::vector<Piece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("graph: no pieces");
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return piece_x_start(a) < piece_x_start(b);
  });
  for (const Piece& p : pieces) {
    if (auto* bp = std::get_if<BranchPiece>(&p)) {
      if (!(bp->span.lo < bp->span.hi))
        throw std::invalid_argument("graph: branch piece with empty interval");
      if (bp->f.kind != BranchKind::Constant && bp->f.scale < 0.0)
        throw std::invalid_argument("graph: branch with negative scale is not monotone");
      if (bp->f.kind == BranchKind::Power && !(bp->f.exponent > 0.0))
        throw std::invalid_argument("graph: power branch needs exponent > 0");
      if (bp->f.kind == BranchKind::LogRatio &&
          (bp->span.lo < -1.0 || bp->span.hi > 1.0))
        throw std::invalid_argument("graph: log_ratio branch only lives on (-1,1)");
    } else {
      const auto& s = std::get<SegmentPiece>(p);
      if (!(s.lo <= s.hi)) throw std::invalid_argument("graph: segment with lo > hi");
    }
  }
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const Piece& l = pieces[i];
    const Piece& r = pieces[i + 1];
    double p = piece_x_end(l);
    if (p != piece_x_start(r))
      throw std::invalid_argument("graph: pieces do not tile the domain (gap or overlap)");
    int owners = (closed_at_end(l) ? 1 : 0) + (closed_at_start(r) ? 1 : 0);
    if (owners != 1)
      throw std::invalid_argument("graph: junction point owned by zero or two pieces");
    double sup_l = junction_sup(l, p);
    double inf_r = junction_inf(r, p);
    if (sup_l > inf_r && !about_equal(sup_l, inf_r))
      throw std::invalid_argument("graph: monotonicity fails at a junction");
    if (!about_equal(sup_l, inf_r))
      throw std::invalid_argument(
          "graph: value gap at a junction (graph would not be maximal)");
  }
  ScalarGraph g;
  g.domain_.lo = piece_x_start(pieces.front());
  g.domain_.lo_closed = closed_at_start(pieces.front()) && std::isfinite(g.domain_.lo);
  g.domain_.hi = piece_x_end(pieces.back());
  g.domain_.hi_closed = closed_at_end(pieces.back()) && std::isfinite(g.domain_.hi);
  g.pieces_ = std::move(pieces);
  return g;
}

ScalarGraph ScalarGraph::linear(double slope) {
  return from_pieces({BranchPiece{{-kInf, kInf, false, false},
                                  {BranchKind::Linear, slope, 0.0}}});
}

ScalarGraph ScalarGraph::cubic(double coeff) {
  return from_pieces({BranchPiece{{-kInf, kInf, false, false},
                                  {BranchKind::Cubic, coeff, 0.0}}});
}

ScalarGraph ScalarGraph::interval_indicator(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("indicator: need lo < hi");
  return from_pieces({SegmentPiece{lo, -kInf, 0.0},
                      BranchPiece{{lo, hi, false, false}, {BranchKind::Constant, 1.0, 0.0}},
                      SegmentPiece{hi, 0.0, kInf}});
}

ScalarGraph ScalarGraph::log_ratio(double coeff) {
  return from_pieces({BranchPiece{{-1.0, 1.0, false, false},
                                  {BranchKind::LogRatio, coeff, 0.0}}});
}

bool ScalarGraph::value_at_zero_contains_zero() const {
  for (const Piece& p : pieces_) {
    if (auto* bp = std::get_if<BranchPiece>(&p)) {
      if (bp->span.contains(0.0)) return bp->f.value(0.0) == 0.0;
    } else {
      const auto& s = std::get<SegmentPiece>(p);
      if (s.at == 0.0) return s.lo <= 0.0 && 0.0 <= s.hi;
    }
  }
  return false;
}

double resolvent(const ScalarGraph& g, double lambda, double r) {
  return resolve_hit(g, lambda, r).y;
}

double yosida(const ScalarGraph& g, double eps, double r) {
  if (!(eps > 0.0)) throw std::invalid_argument("yosida: eps must be > 0");
  ResolventHit hit = resolve_hit(g, eps, r);
  if (auto* bp = std::get_if<BranchPiece>(hit.piece)) {
    // Both routes agree exactly in real arithmetic; pick the better
    // conditioned one. Branch evaluation amplifies the rounding of y by
    // f'(y), the defining quotient by 1/eps (catastrophic at tiny eps).
    double fp = bp->f.slope(hit.y);
    if (std::isfinite(fp) && std::fabs(fp) <= 1.0 / eps) return bp->f.value(hit.y);
    return (double)(((long double)r - (long double)hit.y) / (long double)eps);
  }
  const auto& s = std::get<SegmentPiece>(*hit.piece);
  long double q = ((long double)r - (long double)s.at) / (long double)eps;
  double v = (double)q;
  return std::clamp(v, s.lo, s.hi);
}

double yosida_slope(const ScalarGraph& g, double eps, double r) {
  if (!(eps > 0.0)) throw std::invalid_argument("yosida_slope: eps must be > 0");
  ResolventHit hit = resolve_hit(g, eps, r);
  if (auto* bp = std::get_if<BranchPiece>(hit.piece)) {
    double fp = bp->f.slope(hit.y);
    if (std::isinf(fp)) return 1.0 / eps;
    return fp / (1.0 + eps * fp);
  }
  return 1.0 / eps;
}

double boundary_yosida(const ScalarGraph& g, double eps, double eta, double r) {
  if (!(eta > 0.0)) throw std::invalid_argument("boundary_yosida: eta must be > 0");
  return yosida(g, eps * eta, r);
}

double minimal_section(const ScalarGraph& g, double r) {
  for (const Piece& p : g.pieces()) {
    if (auto* bp = std::get_if<BranchPiece>(&p)) {
      if (bp->span.contains(r)) return bp->f.value(r);
    } else {
      const auto& s = std::get<SegmentPiece>(p);
      if (s.at == r) {
        if (s.lo > 0.0) return s.lo;
        if (s.hi < 0.0) return s.hi;
        return 0.0;
      }
    }
  }
  throw std::domain_error("minimal_section: argument outside D(beta)");
}

ValueRange value_range(const ScalarGraph& g, double r) {
  for (const Piece& p : g.pieces()) {
    if (auto* bp = std::get_if<BranchPiece>(&p)) {
      if (bp->span.contains(r)) {
        double v = bp->f.value(r);
        return {v, v};
      }
    } else {
      const auto& s = std::get<SegmentPiece>(p);
      if (s.at == r) return {s.lo, s.hi};
    }
  }
  return {};
}

double graph_primitive(const ScalarGraph& g, double r) {
  const Interval& d = g.domain();
  if (r < d.lo || r > d.hi) return kInf;
  double a = std::min(0.0, r), b = std::max(0.0, r);
  long double acc = 0.0L;
  for (const Piece& p : g.pieces()) {
    auto* bp = std::get_if<BranchPiece>(&p);
    if (!bp) continue;
    double lo = std::max(a, bp->span.lo);
    double hi = std::min(b, bp->span.hi);
    if (lo < hi)
      acc += (long double)bp->f.primitive(hi) - (long double)bp->f.primitive(lo);
  }
  double v = (double)(r >= 0.0 ? acc : -acc);
  return std::max(v, 0.0);
}

double moreau_primitive(const ScalarGraph& g, double eps, double r) {
  if (!(eps > 0.0)) throw std::invalid_argument("moreau_primitive: eps must be > 0");
  double y = resolvent(g, eps, r);
  long double dr = (long double)r - (long double)y;
  double v = (double)((long double)graph_primitive(g, y) + dr * dr / (2.0L * eps));
  return std::max(v, 0.0);
}

ScalarGraph scaled(const ScalarGraph& g, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("scaled: need b > 0");
  std::vector<Piece> out = g.pieces();
  for (Piece& p : out) {
    if (auto* bp = std::get_if<BranchPiece>(&p)) {
      bp->f.scale *= b;
      bp->f.offset *= b;
    } else {
      auto& s = std::get<SegmentPiece>(p);
      s.lo *= b;
      s.hi *= b;
    }
  }
  return ScalarGraph::from_pieces(std::move(out));
}

ScalarGraph shifted(const ScalarGraph& g, double a) {
  std::vector<Piece> out = g.pieces();
  for (Piece& p : out) {
    if (auto* bp = std::get_if<BranchPiece>(&p)) {
      bp->f.offset += a;
    } else {
      auto& s = std::get<SegmentPiece>(p);
      s.lo += a;
      s.hi += a;
    }
  }
  return ScalarGraph::from_pieces(std::move(out));
}

double Perturbation::operator()(double r) const {
  switch (kind) {
    case PerturbationKind::Zero:
      return 0.0;
    case PerturbationKind::Linear:
      return coeff * r;
    case PerturbationKind::Sine:
      return coeff * std::sin(r);
  }
  return 0.0;
}

double Perturbation::slope(double r) const {
  switch (kind) {
    case PerturbationKind::Zero:
      return 0.0;
    case PerturbationKind::Linear:
      return coeff;
    case PerturbationKind::Sine:
      return coeff * std::cos(r);
  }
  return 0.0;
}

double Perturbation::primitive(double r) const {
  switch (kind) {
    case PerturbationKind::Zero:
      return 0.0;
    case PerturbationKind::Linear:
      return 0.5 * coeff * r * r;
    case PerturbationKind::Sine:
      return coeff * (1.0 - std::cos(r));
  }
  return 0.0;
}

double Perturbation::lipschitz() const {
  return kind == PerturbationKind::Zero ? 0.0 : std::fabs(coeff);
}

PotentialPair catalog(const std::string& name) {
  if (name == "double_well")
    return {name, ScalarGraph::cubic(1.0), {PerturbationKind::Linear, -1.0}};
  if (name == "double_obstacle")
    return {name, ScalarGraph::interval_indicator(-1.0, 1.0),
            {PerturbationKind::Linear, -1.0}};
  if (name == "linear_test")
    return {name, ScalarGraph::linear(1.0), {PerturbationKind::Zero, 0.0}};
  throw std::invalid_argument("catalog: unknown potential '" + name + "'");
}

std::vector<double> default_compatibility_samples(const ScalarGraph& beta_gamma) {
  const Interval& d = beta_gamma.domain();
  double lo = std::max(d.lo, -5.0);
  double hi = std::min(d.hi, 5.0);
  std::vector<double> out;
  out.reserve(2001);
  for (int i = 0; i <= 2000; ++i) {
    double r = lo + (hi - lo) * i / 2000.0;
    if (r == d.lo && !d.lo_closed) r = lo + (hi - lo) * 1e-9;
    if (r == d.hi && !d.hi_closed) r = hi - (hi - lo) * 1e-9;
    out.push_back(r);
  }
  return out;
}

CompatibilityReport check_compatibility(const ScalarGraph& beta,
                                        const ScalarGraph& beta_gamma,
                                        std::span<const double> samples) {
  CompatibilityReport rep;
  rep.verified_on.assign(samples.begin(), samples.end());
  const Interval& db = beta.domain();
  const Interval& dg = beta_gamma.domain();
  rep.domain_ok = db.contains_interval(dg);
  if (!rep.domain_ok) {
    double w;
    if (dg.lo < db.lo)
      w = dg.lo_closed ? dg.lo : 0.5 * (dg.lo + std::min(db.lo, dg.hi));
    else if (dg.lo == db.lo && dg.lo_closed && !db.lo_closed)
      w = dg.lo;
    else if (dg.hi > db.hi)
      w = dg.hi_closed ? dg.hi : 0.5 * (dg.hi + std::max(db.hi, dg.lo));
    else
      w = dg.hi;
    rep.witness = w;
    rep.holds = false;
    std::ostringstream os;
    os << "domain inclusion D(beta) >= D(beta_Gamma) fails at r = " << w;
    rep.detail = os.str();
    return rep;
  }
  for (double r : samples)
    if (!dg.contains(r))
      throw std::invalid_argument("check_compatibility: sample outside D(beta_Gamma)");

  static constexpr double kEtaGrid[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  double best_eta = 1.0, best_c = kInf;
  for (double eta : kEtaGrid) {
    double c = 0.0;
    for (double r : samples) {
      double need = std::fabs(minimal_section(beta, r)) -
                    eta * std::fabs(minimal_section(beta_gamma, r));
      c = std::max(c, need);
    }
    c = std::max(c, 0.0);
    auto key = [](double cc, double ee) {
      return std::make_tuple(cc, std::fabs(std::log(ee)), ee);
    };
    if (key(c, eta) < key(best_c, best_eta)) {
      best_c = c;
      best_eta = eta;
    }
  }
  rep.eta = best_eta;
  rep.c_gamma = best_c;

  bool pointwise_ok = true;
  for (double r : samples) {
    double lhs = std::fabs(minimal_section(beta, r));
    double rhs = rep.eta * std::fabs(minimal_section(beta_gamma, r)) + rep.c_gamma;
    if (lhs > rhs + 1e-10 * std::max(1.0, lhs)) pointwise_ok = false;
  }

  // eps-level transfer on a fixed grid of r in R
  std::vector<double> rgrid(samples.begin(), samples.end());
  for (int i = 0; i <= 1000; ++i) rgrid.push_back(-5.0 + 10.0 * i / 1000.0);
  bool eps_ok = true;
  double worst = 0.0, worst_r = 0.0, worst_eps = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    for (double r : rgrid) {
      double lhs = std::fabs(yosida(beta, eps, r));
      double rhs =
          rep.eta * std::fabs(boundary_yosida(beta_gamma, eps, rep.eta, r)) + rep.c_gamma;
      double slack = 1e-10 * std::max(1.0, lhs);
      if (lhs > rhs + slack) {
        eps_ok = false;
        if (lhs - rhs > worst) {
          worst = lhs - rhs;
          worst_r = r;
          worst_eps = eps;
        }
      }
    }
  }
  rep.holds = pointwise_ok && eps_ok;
  std::ostringstream os;
  os << "eta = " << rep.eta << ", C_Gamma = " << rep.c_gamma << ", samples = "
     << samples.size() << (rep.holds ? ", holds" : ", FAILS");
  if (!eps_ok)
    os << " (eps-level violation " << worst << " at r = " << worst_r
       << ", eps = " << worst_eps << ")";
  rep.detail = os.str();
  return rep;
}

}  // namespace acdb
