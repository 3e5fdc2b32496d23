#pragma once

// Named space-time closed forms for initial data and forcing terms: sums of
// primitive terms evaluated on grid nodes. Everything is deterministic and
// reproducible from the config echo alone.

#include <cmath>
#include <vector>

namespace acdb {

enum class TermKind {
  Constant,      // a
  CosX,          // a cos(k (x - x0))
  CosXStripY,    // a e^{c t} cos(k (x - x0)) (1 + (y/ly)^2 - y/ly)
  MixedModes,    // a * fixed multi-mode pattern, values within +-0.75 a
  MmsBulkForce,  // bulk forcing manufactured for the double-well potential
  MmsBoundaryForce  // boundary forcing manufactured for the double-well potential
};

struct Term {
  TermKind kind = TermKind::Constant;
  double amplitude = 0.0;
  double wavenumber = 0.0;  // k
  double phase = 0.0;       // x0
  double decay = 0.0;       // c in e^{c t}
  double ly = 1.0;
  double nu = 0.0;          // MmsBoundaryForce only

  double eval(double x, double y, double t) const {
    switch (kind) {
      case TermKind::Constant:
        return amplitude;
      case TermKind::CosX:
        return amplitude * std::cos(wavenumber * (x - phase));
      case TermKind::CosXStripY: {
        double s = y / ly;
        return amplitude * std::exp(decay * t) * std::cos(wavenumber * (x - phase)) *
               (1.0 + s * s - s);
      }
      case TermKind::MixedModes: {
        double k = wavenumber;
        double fx = 0.4 * std::cos(k * x) + 0.25 * std::cos(2.0 * k * x + 1.3) +
                    0.1 * std::cos(3.0 * k * x + 2.1);
        double fy = 0.6 + 0.4 * std::cos(2.0 * std::acos(-1.0) * y / ly);
        return amplitude * fx * fy;
      }
      case TermKind::MmsBulkForce: {
        // u* = a e^{-t} cos(k(x-x0)) (1 + (y/ly)^2 - y/ly) solving the
        // double-well system: f = u*_t - lap u* + u*^3 - u*
        double s = y / ly;
        double cx = std::cos(wavenumber * (x - phase));
        double et = std::exp(-t);
        double us = amplitude * et * cx * (1.0 + s * s - s);
        return (wavenumber * wavenumber - 2.0) * us -
               (2.0 * amplitude / (ly * ly)) * et * cx + us * us * us;
      }
      case TermKind::MmsBoundaryForce: {
        // on both boundary rows the profile factor is 1 and the outward
        // normal derivative is a e^{-t} cos(k(x-x0))/ly
        double cx = std::cos(wavenumber * (x - phase));
        double et = std::exp(-t);
        double v = amplitude * et * cx;
        return v / ly + (nu * wavenumber * wavenumber - 2.0) * v + v * v * v;
      }
    }
    return 0.0;
  }
};

struct SpaceTimeFn {
  std::vector<Term> terms;

  double operator()(double x, double y, double t) const {
    double s = 0.0;
    for (const Term& tm : terms) s += tm.eval(x, y, t);
    return s;
  }
  bool is_zero() const { return terms.empty(); }

  SpaceTimeFn& add(Term t) {
    terms.push_back(t);
    return *this;
  }

  static SpaceTimeFn zero() { return {}; }
  static SpaceTimeFn constant(double a) {
    SpaceTimeFn f;
    if (a != 0.0) f.add({TermKind::Constant, a});
    return f;
  }
  static SpaceTimeFn cos_x(double a, double k, double x0 = 0.0) {
    SpaceTimeFn f;
    f.add({TermKind::CosX, a, k, x0});
    return f;
  }
  static SpaceTimeFn mixed_modes(double a, double k, double ly) {
    SpaceTimeFn f;
    Term t{TermKind::MixedModes, a, k};
    t.ly = ly;
    f.add(t);
    return f;
  }
};

// The manufactured family for verification runs against the double-well
// potential, parameterized so x-translates stay in the family.
struct ManufacturedSolution {
  double amplitude = 0.9;
  double wavenumber = 0.0;  // 2 pi / lx
  double phase = 0.0;
  double ly = 1.0;
  double nu = 1.0;

  SpaceTimeFn solution() const {
    SpaceTimeFn f;
    Term t{TermKind::CosXStripY, amplitude, wavenumber, phase, -1.0};
    t.ly = ly;
    f.add(t);
    return f;
  }
  SpaceTimeFn bulk_force() const {
    SpaceTimeFn f;
    Term t{TermKind::MmsBulkForce, amplitude, wavenumber, phase, -1.0};
    t.ly = ly;
    f.add(t);
    return f;
  }
  SpaceTimeFn boundary_force() const {
    SpaceTimeFn f;
    Term t{TermKind::MmsBoundaryForce, amplitude, wavenumber, phase, -1.0};
    t.ly = ly;
    t.nu = nu;
    f.add(t);
    return f;
  }
};

}  // namespace acdb
