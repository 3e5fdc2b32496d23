#include "acdb/mesh.hpp"

#include <cmath>

namespace acdb {

namespace {

void require_conforming(const StripMesh& m, const Field& u, const char* op) {
  if (!u.conforms(m)) throw std::invalid_argument(std::string(op) + ": field/mesh shape mismatch");
}

}  // namespace

Field laplacian(const StripMesh& m, const Field& u) {
  require_conforming(m, u, "laplacian");
  Field out(m);
  const double ihx2 = 1.0 / (m.hx() * m.hx());
  const double ihy2 = 1.0 / (m.hy() * m.hy());
  for (int j = 1; j < m.ny - 1; ++j)
    for (int i = 0; i < m.nx; ++i) {
      int il = (i == 0) ? m.nx - 1 : i - 1;
      int ir = (i == m.nx - 1) ? 0 : i + 1;
      out(i, j) = (u(il, j) - 2.0 * u(i, j) + u(ir, j)) * ihx2 +
                  (u(i, j - 1) - 2.0 * u(i, j) + u(i, j + 1)) * ihy2;
    }
  return out;
}

std::vector<double> laplace_beltrami(const StripMesh& m, std::span<const double> row) {
  if ((int)row.size() != m.nx)
    throw std::invalid_argument("laplace_beltrami: row length mismatch");
  const double ihx2 = 1.0 / (m.hx() * m.hx());
  std::vector<double> out(m.nx);
  for (int i = 0; i < m.nx; ++i) {
    int il = (i == 0) ? m.nx - 1 : i - 1;
    int ir = (i == m.nx - 1) ? 0 : i + 1;
    out[i] = (row[il] - 2.0 * row[i] + row[ir]) * ihx2;
  }
  return out;
}

std::vector<double> normal_derivative(const StripMesh& m, const Field& u, Side side) {
  require_conforming(m, u, "normal_derivative");
  const double ihy = 1.0 / (2.0 * m.hy());
  std::vector<double> out(m.nx);
  if (side == Side::Bottom) {
    for (int i = 0; i < m.nx; ++i)
      out[i] = -(-3.0 * u(i, 0) + 4.0 * u(i, 1) - u(i, 2)) * ihy;
  } else {
    int n = m.ny - 1;
    for (int i = 0; i < m.nx; ++i)
      out[i] = (3.0 * u(i, n) - 4.0 * u(i, n - 1) + u(i, n - 2)) * ihy;
  }
  return out;
}

std::vector<double> sbp_normal_flux(const StripMesh& m, const Field& u, Side side) {
  require_conforming(m, u, "sbp_normal_flux");
  const double ihy = 1.0 / m.hy();
  const double half_tangential = 0.5 * m.hy() / (m.hx() * m.hx());
  std::vector<double> out(m.nx);
  int j = (side == Side::Bottom) ? 0 : m.ny - 1;
  int jin = (side == Side::Bottom) ? 1 : m.ny - 2;
  for (int i = 0; i < m.nx; ++i) {
    int il = (i == 0) ? m.nx - 1 : i - 1;
    int ir = (i == m.nx - 1) ? 0 : i + 1;
    out[i] = (u(i, j) - u(i, jin)) * ihy +
             half_tangential * (2.0 * u(i, j) - u(il, j) - u(ir, j));
  }
  return out;
}

double inner_bulk(const StripMesh& m, const Field& a, const Field& b) {
  require_conforming(m, a, "inner_bulk");
  require_conforming(m, b, "inner_bulk");
  long double acc = 0.0L;
  for (int j = 0; j < m.ny; ++j) {
    double w = (j == 0 || j == m.ny - 1) ? 0.5 : 1.0;
    long double rowacc = 0.0L;
    for (int i = 0; i < m.nx; ++i) rowacc += (long double)a(i, j) * b(i, j);
    acc += w * rowacc;
  }
  return (double)(acc * m.hx() * m.hy());
}

double inner_boundary(const StripMesh& m, const Field& a, const Field& b) {
  require_conforming(m, a, "inner_boundary");
  require_conforming(m, b, "inner_boundary");
  long double acc = 0.0L;
  for (int i = 0; i < m.nx; ++i)
    acc += (long double)a(i, 0) * b(i, 0) + (long double)a(i, m.ny - 1) * b(i, m.ny - 1);
  return (double)(acc * m.hx());
}

double grad_form(const StripMesh& m, const Field& a, const Field& b) {
  require_conforming(m, a, "grad_form");
  require_conforming(m, b, "grad_form");
  const double ihx = 1.0 / m.hx();
  const double ihy = 1.0 / m.hy();
  long double acc = 0.0L;
  for (int j = 0; j < m.ny; ++j) {
    double w = (j == 0 || j == m.ny - 1) ? 0.5 : 1.0;
    long double rowacc = 0.0L;
    for (int i = 0; i < m.nx; ++i) {
      int ir = (i == m.nx - 1) ? 0 : i + 1;
      rowacc += (long double)((a(ir, j) - a(i, j)) * ihx) * ((b(ir, j) - b(i, j)) * ihx);
    }
    acc += w * rowacc;
  }
  for (int j = 0; j + 1 < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      acc += (long double)((a(i, j + 1) - a(i, j)) * ihy) * ((b(i, j + 1) - b(i, j)) * ihy);
  return (double)(acc * m.hx() * m.hy());
}

double boundary_grad_form(const StripMesh& m, const Field& a, const Field& b) {
  require_conforming(m, a, "boundary_grad_form");
  require_conforming(m, b, "boundary_grad_form");
  const double ihx = 1.0 / m.hx();
  long double acc = 0.0L;
  for (int j : {0, m.ny - 1})
    for (int i = 0; i < m.nx; ++i) {
      int ir = (i == m.nx - 1) ? 0 : i + 1;
      acc += (long double)((a(ir, j) - a(i, j)) * ihx) * ((b(ir, j) - b(i, j)) * ihx);
    }
  return (double)(acc * m.hx());
}

NormSet norms(const StripMesh& m, const Field& u) {
  NormSet n;
  n.l2_bulk = std::sqrt(std::max(0.0, inner_bulk(m, u, u)));
  n.l2_boundary = std::sqrt(std::max(0.0, inner_boundary(m, u, u)));
  n.h1_semi_bulk = std::sqrt(std::max(0.0, grad_form(m, u, u)));
  n.h1_semi_boundary = std::sqrt(std::max(0.0, boundary_grad_form(m, u, u)));
  return n;
}

}  // namespace acdb
