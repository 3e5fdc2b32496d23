#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// a bisection resolvent working straight off the piece list, adaptive Simpson
// quadrature, and a fixed-step RK4 scalar ODE integrator.

#include <cmath>
#include <functional>
#include <utility>

#include "acdb/graphs.hpp"

namespace oracle {

// [inf beta(y), sup beta(y)] read directly from the piece list.
inline std::pair<double, double> value_range(const acdb::ScalarGraph& g, double y) {
  for (const acdb::Piece& p : g.pieces()) {
    if (auto* bp = std::get_if<acdb::BranchPiece>(&p)) {
      if (bp->span.contains(y)) {
        double v = bp->f.value(y);
        return {v, v};
      }
    } else {
      const auto& s = std::get<acdb::SegmentPiece>(p);
      if (s.at == y) return {s.lo, s.hi};
    }
  }
  return {acdb::kInf, -acdb::kInf};  // outside D(beta)
}

// Brute-force resolvent: bisection on the monotone inclusion r in y + l*beta(y).
inline double resolvent(const acdb::ScalarGraph& g, double lambda, double r) {
  const acdb::Interval& d = g.domain();
  double a = std::max(d.lo, -1e6);
  double b = std::min(d.hi, 1e6);
  if (a == b) return a;
  for (int i = 0; i < 200; ++i) {
    double y = 0.5 * (a + b);
    auto [lo, hi] = oracle::value_range(g, y);
    if (y + lambda * hi < r)
      a = y;
    else if (y + lambda * lo > r)
      b = y;
    else
      return y;
  }
  // decide which bracket end satisfies the inclusion best
  auto dist = [&](double y) {
    auto [lo, hi] = oracle::value_range(g, y);
    double vlo = y + lambda * lo, vhi = y + lambda * hi;
    if (r < vlo) return vlo - r;
    if (r > vhi) return r - vhi;
    return 0.0;
  };
  return dist(a) <= dist(b) ? a : b;
}

inline double yosida(const acdb::ScalarGraph& g, double eps, double r) {
  return (r - oracle::resolvent(g, eps, r)) / eps;
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol) {
  struct Rec {
    static double run(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb, double whole, double tol,
                      int depth) {
      double m = 0.5 * (a + b);
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth > 40 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return run(f, a, m, fa, flm, fm, left, tol * 0.5, depth + 1) +
             run(f, m, b, fm, frm, fb, right, tol * 0.5, depth + 1);
    }
  };
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec::run(f, a, b, fa, fm, fb, whole, tol, 0);
}

// Fixed-step RK4 for u' = rhs(t, u).
inline double rk4(const std::function<double(double, double)>& rhs, double u0,
                  double t0, double t1, int steps) {
  double u = u0, t = t0;
  double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    double k1 = rhs(t, u);
    double k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1);
    double k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2);
    double k4 = rhs(t + h, u + h * k3);
    u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return u;
}

}  // namespace oracle
