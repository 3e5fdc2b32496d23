#pragma once

// Periodic-strip discretization: a rectangle periodic in x whose two
// horizontal edge rows carry their own dynamics. The boundary is a pair of
// disjoint circles, so the surface Laplacian is a 1D periodic operator and
// the geometry has no corners.

#include <span>
#include <stdexcept>
#include <vector>

namespace acdb {

struct StripMesh {
  int nx = 64;  // periodic cells in x
  int ny = 64;  // nodes in y, including both boundary rows
  double lx = 1.0;
  double ly = 1.0;

  double hx() const { return lx / nx; }
  double hy() const { return ly / (ny - 1); }
  int node_count() const { return nx * ny; }
  int node(int i, int j) const { return j * nx + i; }
  double x(int i) const { return lx * i / nx; }
  double y(int j) const { return ly * j / (ny - 1); }

  void validate() const {
    if (nx < 4 || ny < 4) throw std::invalid_argument("mesh: need nx >= 4 and ny >= 4");
    if (!(lx > 0.0) || !(ly > 0.0))
      throw std::invalid_argument("mesh: need lx > 0 and ly > 0");
  }
};

// Grid function including the two boundary rows; the trace is the rows
// themselves (v := u restricted to the boundary).
struct Field {
  int nx = 0;
  int ny = 0;
  std::vector<double> v;

  Field() = default;
  explicit Field(const StripMesh& m) : nx(m.nx), ny(m.ny), v(m.node_count(), 0.0) {}

  double& operator()(int i, int j) { return v[(std::size_t)j * nx + i]; }
  double operator()(int i, int j) const { return v[(std::size_t)j * nx + i]; }

  std::span<const double> row(int j) const { return {v.data() + (std::size_t)j * nx, (std::size_t)nx}; }
  std::span<double> row(int j) { return {v.data() + (std::size_t)j * nx, (std::size_t)nx}; }
  std::span<const double> bottom() const { return row(0); }
  std::span<const double> top() const { return row(ny - 1); }

  bool conforms(const StripMesh& m) const { return nx == m.nx && ny == m.ny; }
};

struct NormSet {
  double l2_bulk = 0.0;
  double l2_boundary = 0.0;       // both boundary circles together
  double h1_semi_bulk = 0.0;
  double h1_semi_boundary = 0.0;
};

enum class Side { Bottom, Top };

// 5-point stencil on interior rows, periodic in x; boundary rows are zero
// (their coupling is handled by the variational assembly).
Field laplacian(const StripMesh& m, const Field& u);

// Periodic second difference along a boundary circle.
std::vector<double> laplace_beltrami(const StripMesh& m, std::span<const double> row);

// Outward normal derivative via the second-order 3-point one-sided formula.
std::vector<double> normal_derivative(const StripMesh& m, const Field& u, Side side);

// The discrete flux for which the summation-by-parts identity
//   <-lap u, z>_bulk = <grad u, grad z> - <flux, z>_boundary
// holds exactly: first-order vertical difference plus the half-row
// tangential correction. This is the flux the solver assembles with.
std::vector<double> sbp_normal_flux(const StripMesh& m, const Field& u, Side side);

// Quadratures: trapezoid in y (half weights on the boundary rows), uniform
// periodic in x; the boundary product sums both circles.
double inner_bulk(const StripMesh& m, const Field& a, const Field& b);
double inner_boundary(const StripMesh& m, const Field& a, const Field& b);
double grad_form(const StripMesh& m, const Field& a, const Field& b);
double boundary_grad_form(const StripMesh& m, const Field& a, const Field& b);

NormSet norms(const StripMesh& m, const Field& u);

}  // namespace acdb
