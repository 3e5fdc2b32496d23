#pragma once

// Scalar calculus of maximal monotone graphs on R: resolvents (proximal
// maps), Yosida approximations, minimal sections, Moreau primitives, and
// the scale/shift transforms the regularization layer relies on.
//
// A graph is stored as an ordered list of pieces tiling its domain: closed
// form monotone branches over intervals, and vertical segments at single
// points. Every catalog graph gets an exact resolvent; branches without a
// closed form fall back to a safeguarded Newton/bisection solve.

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace acdb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class BranchKind { Constant, Linear, Cubic, Power, LogRatio };

// f(y) = offset + scale * base(y) with base one of
//   Constant: 0,  Linear: y,  Cubic: y^3,
//   Power: sign(y)|y|^p,  LogRatio: log((1+y)/(1-y)) on (-1,1).
// scale >= 0 keeps every branch nondecreasing.
struct Branch {
  BranchKind kind = BranchKind::Constant;
  double scale = 1.0;
  double offset = 0.0;
  double exponent = 1.0;  // Power only

  double value(double y) const;
  double slope(double y) const;
  double primitive(double y) const;  // antiderivative of value with F(0) = 0
};

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double r) const {
    if (r < lo || r > hi) return false;
    if (r == lo && !lo_closed) return false;
    if (r == hi && !hi_closed) return false;
    return true;
  }
  bool contains_interval(const Interval& other) const;
};

struct BranchPiece {
  Interval span;
  Branch f;
};

// Vertical segment {at} x [lo, hi], +-inf allowed.
struct SegmentPiece {
  double at = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

using Piece = std::variant<BranchPiece, SegmentPiece>;

class ScalarGraph {
 public:
  ScalarGraph() = default;

  // Validates ordering, tiling (no gaps/overlaps), junction continuity of the
  // closure, and branch monotonicity. Throws std::invalid_argument.
  static ScalarGraph from_pieces(std::vector<Piece> pieces);

  static ScalarGraph linear(double slope = 1.0);
  static ScalarGraph cubic(double coeff = 1.0);
  static ScalarGraph interval_indicator(double lo = -1.0, double hi = 1.0);
  static ScalarGraph log_ratio(double coeff = 1.0);  // domain (-1, 1)

  const std::vector<Piece>& pieces() const { return pieces_; }
  const Interval& domain() const { return domain_; }
  bool value_at_zero_contains_zero() const;

 private:
  std::vector<Piece> pieces_;
  Interval domain_;
};

// y with r in y + lambda*beta(y); defined on all of R for maximal graphs.
// Throws std::domain_error when r is outside the range of I + lambda*beta
// (a non-maximal piece list) and std::runtime_error when the scalar root
// finder fails to converge.
double resolvent(const ScalarGraph& g, double lambda, double r);

// eps^{-1}(I - (I + eps beta)^{-1}), evaluated as the branch value at the
// resolvent point where one exists (exact graph membership); 1/eps-Lipschitz.
double yosida(const ScalarGraph& g, double eps, double r);

// d/dr of the Yosida approximation (a.e.; one-sided at kinks).
double yosida_slope(const ScalarGraph& g, double eps, double r);

// Yosida approximation of parameter eps*eta, the boundary-graph convention.
double boundary_yosida(const ScalarGraph& g, double eps, double eta, double r);

// Element of beta(r) of minimum modulus; throws std::domain_error off D(beta).
double minimal_section(const ScalarGraph& g, double r);

// [inf, sup] of beta(r); lo > hi signals r outside D(beta).
struct ValueRange {
  double lo = kInf;
  double hi = -kInf;
};
ValueRange value_range(const ScalarGraph& g, double r);

// beta_hat(r) = int_0^r beta(s) ds (piecewise closed form); +inf outside the
// domain closure. Requires 0 in D(beta).
double graph_primitive(const ScalarGraph& g, double r);

// beta_hat_eps(r) = int_0^r beta_eps(s) ds, via the Moreau envelope identity
// beta_hat(J_eps r) + |r - J_eps r|^2 / (2 eps).
double moreau_primitive(const ScalarGraph& g, double eps, double r);

// b*beta and beta + a as graphs (b > 0).
ScalarGraph scaled(const ScalarGraph& g, double b);
ScalarGraph shifted(const ScalarGraph& g, double a);

enum class PerturbationKind { Zero, Linear, Sine };

// Lipschitz perturbation pi with primitive Pi, Pi(0) = 0.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::Zero;
  double coeff = 0.0;

  double operator()(double r) const;
  double slope(double r) const;
  double primitive(double r) const;
  double lipschitz() const;
};

struct PotentialPair {
  std::string name;
  ScalarGraph graph;
  Perturbation pi;

  double primitive(double r) const { return graph_primitive(graph, r); }
};

// Built-in potentials: double_well (beta = r^3, pi = -r), double_obstacle
// (beta = subdifferential of the indicator of [-1,1], pi = -r), linear_test
// (beta = r, pi = 0). Throws std::invalid_argument on unknown names.
PotentialPair catalog(const std::string& name);

struct CompatibilityReport {
  double eta = 1.0;
  double c_gamma = 0.0;
  std::vector<double> verified_on;
  bool holds = false;
  bool domain_ok = false;
  std::optional<double> witness;  // domain-inclusion violation witness
  std::string detail;
};

// Certifies |beta°(r)| <= eta |beta_Gamma°(r)| + C_Gamma on the samples
// (all must lie in D(beta_Gamma)), then verifies the eps-level transfer
// |beta_eps(r)| <= eta |beta_{Gamma,eps}(r)| + C_Gamma on a fixed grid of
// r in R and eps in {1e-1, 1e-2, 1e-3}, with 1e-10 relative rounding slack.
// Domain inclusion D(beta) >= D(beta_Gamma) is rejected with a witness.
CompatibilityReport check_compatibility(const ScalarGraph& beta,
                                        const ScalarGraph& beta_gamma,
                                        std::span<const double> samples);

// 2001 uniform points on D(beta_Gamma) (truncated to [-5,5] when unbounded)
// plus both closed endpoints.
std::vector<double> default_compatibility_samples(const ScalarGraph& beta_gamma);

}  // namespace acdb
