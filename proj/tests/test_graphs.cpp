#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "acdb/graphs.hpp"
#include "oracles.hpp"

using namespace acdb;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

// Monotone hull of beta over [y-h, y+h]: membership of (y, q) in the graph up
// to a horizontal slack h and vertical slack tol. The horizontal slack keeps
// the check meaningful at asymptotes, where beta amplifies the rounding of y.
bool member_within(const ScalarGraph& g, double y, double q, double h, double tol) {
  const Interval& d = g.domain();
  double lo_b = kInf, hi_b = -kInf;
  for (double z : {y - h, y, y + h}) {
    if (z < d.lo || (z == d.lo && !d.lo_closed)) {
      lo_b = -kInf;
      continue;
    }
    if (z > d.hi || (z == d.hi && !d.hi_closed)) {
      hi_b = kInf;
      continue;
    }
    auto [vlo, vhi] = oracle::value_range(g, z);
    lo_b = std::min(lo_b, vlo);
    hi_b = std::max(hi_b, vhi);
  }
  return q >= lo_b - tol && q <= hi_b + tol;
}

const char* kCatalogNames[] = {"double_well", "double_obstacle", "linear_test"};

}  // namespace

TEST_CASE("resolvent: frozen examples") {
  auto ind = ScalarGraph::interval_indicator();
  auto lin = ScalarGraph::linear();
  CHECK(resolvent(ind, 0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(resolvent(lin, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (const char* name : kCatalogNames)
    CHECK(resolvent(catalog(name).graph, 0.7, 0.0) == 0.0);
}

TEST_CASE("resolvent: agrees with bisection oracle") {
  std::vector<ScalarGraph> graphs;
  for (const char* name : kCatalogNames) graphs.push_back(catalog(name).graph);
  graphs.push_back(ScalarGraph::cubic(3.0));
  graphs.push_back(ScalarGraph::log_ratio(0.5));
  graphs.push_back(shifted(ScalarGraph::interval_indicator(), 0.75));
  graphs.push_back(scaled(ScalarGraph::cubic(), 2.5));
  for (const auto& g : graphs)
    for (double lambda : {1e-3, 1e-1, 1.0})
      for (double r : linspace(-4.0, 4.0, 41)) {
        double mine = resolvent(g, lambda, r);
        double ref = oracle::resolvent(g, lambda, r);
        CHECK(std::fabs(mine - ref) <= 1e-9);
      }
}

TEST_CASE("resolvent: nonexpansive") {
  auto rs = linspace(-5.0, 5.0, 101);
  for (const char* name : kCatalogNames) {
    auto g = catalog(name).graph;
    for (double lambda : {1e-3, 1e-1, 1.0})
      for (size_t i = 0; i + 1 < rs.size(); ++i) {
        double d = std::fabs(resolvent(g, lambda, rs[i + 1]) - resolvent(g, lambda, rs[i]));
        CHECK(d <= std::fabs(rs[i + 1] - rs[i]) + 1e-14);
      }
  }
}

TEST_CASE("resolvent: malformed graph is rejected") {
  // branch on [0, inf) alone: not maximal, range misses r < 0
  auto g = ScalarGraph::from_pieces(
      {BranchPiece{{0.0, kInf, true, false}, {BranchKind::Linear, 1.0, 0.0}}});
  CHECK_THROWS_AS((void)resolvent(g, 1.0, -1.0), std::domain_error);
  CHECK(resolvent(g, 1.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("yosida: frozen examples") {
  auto lin = ScalarGraph::linear();
  auto ind = ScalarGraph::interval_indicator();
  CHECK(yosida(lin, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(yosida(ind, 0.5, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(yosida(ind, 0.25, 0.3) == 0.0);
  CHECK(yosida(ind, 1e-3, 0.3) == 0.0);
}

TEST_CASE("yosida: matches (r - resolvent)/eps and stays in the graph") {
  std::vector<ScalarGraph> graphs;
  for (const char* name : kCatalogNames) graphs.push_back(catalog(name).graph);
  graphs.push_back(ScalarGraph::log_ratio(1.0));
  for (const auto& g : graphs)
    for (double eps : {1e-3, 1e-1, 1.0})
      for (double r : linspace(-4.5, 4.5, 61)) {
        double q = yosida(g, eps, r);
        double y = resolvent(g, eps, r);
        CHECK(std::fabs(q - (r - y) / eps) <= 1e-10 * std::max(1.0, std::fabs(q)));
        CHECK(member_within(g, y, q, 1e-10 * (1.0 + std::fabs(y)),
                            1e-10 * (1.0 + std::fabs(q))));
      }
}

TEST_CASE("yosida: Lipschitz bound 1/eps") {
  auto rs = linspace(-5.0, 5.0, 201);
  for (const char* name : kCatalogNames) {
    auto g = catalog(name).graph;
    for (double eps : {1e-2, 1e-1, 1.0})
      for (size_t i = 0; i + 1 < rs.size(); ++i) {
        double d = std::fabs(yosida(g, eps, rs[i + 1]) - yosida(g, eps, rs[i]));
        CHECK(d <= std::fabs(rs[i + 1] - rs[i]) / eps * (1.0 + 1e-12) + 1e-12);
      }
  }
}

TEST_CASE("yosida: monotone in r") {
  for (const char* name : kCatalogNames) {
    auto g = catalog(name).graph;
    auto rs = linspace(-5.0, 5.0, 201);
    for (double eps : {1e-2, 1.0})
      for (size_t i = 0; i + 1 < rs.size(); ++i)
        CHECK(yosida(g, eps, rs[i + 1]) >= yosida(g, eps, rs[i]) - 1e-12);
  }
}

TEST_CASE("boundary_yosida: frozen examples") {
  auto ind = ScalarGraph::interval_indicator();
  auto lin = ScalarGraph::linear();
  CHECK(boundary_yosida(ind, 0.5, 2.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(boundary_yosida(lin, 1.0, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (const char* name : kCatalogNames)
    CHECK(boundary_yosida(catalog(name).graph, 0.3, 1.7, 0.0) == 0.0);
}

TEST_CASE("minimal_section: examples and domain error") {
  auto ind = ScalarGraph::interval_indicator();
  CHECK(minimal_section(ind, 1.0) == 0.0);
  CHECK(minimal_section(ind, -1.0) == 0.0);
  CHECK(minimal_section(ScalarGraph::cubic(), 2.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS((void)minimal_section(ind, 1.5), std::domain_error);

  // segment {2} x [3, 5] embedded between matching affine branches
  auto g = ScalarGraph::from_pieces(
      {BranchPiece{{-kInf, 2.0, false, false}, {BranchKind::Linear, 1.0, 1.0}},
       SegmentPiece{2.0, 3.0, 5.0},
       BranchPiece{{2.0, kInf, false, false}, {BranchKind::Linear, 1.0, 3.0}}});
  CHECK(minimal_section(g, 2.0) == 3.0);
}

TEST_CASE("dominance: |yosida| <= |minimal section| and 0 <= moreau <= primitive") {
  for (const char* name : kCatalogNames) {
    auto g = catalog(name).graph;
    const Interval& d = g.domain();
    double lo = std::max(d.lo, -5.0), hi = std::min(d.hi, 5.0);
    for (double eps : {1e-3, 1e-2, 1e-1})
      for (double r : linspace(lo, hi, 101)) {
        if (!d.contains(r)) continue;
        CHECK(std::fabs(yosida(g, eps, r)) <=
              std::fabs(minimal_section(g, r)) + 1e-10);
        double me = moreau_primitive(g, eps, r);
        CHECK(me >= 0.0);
        CHECK(me <= graph_primitive(g, r) + 1e-10);
      }
  }
}

TEST_CASE("moreau_primitive: frozen examples") {
  auto lin = ScalarGraph::linear();
  auto ind = ScalarGraph::interval_indicator();
  CHECK(moreau_primitive(lin, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moreau_primitive(ind, 0.3, 0.5) == 0.0);
  for (const char* name : kCatalogNames)
    CHECK(moreau_primitive(catalog(name).graph, 0.17, 0.0) == 0.0);
}

TEST_CASE("moreau_primitive: equals the quadrature of the Yosida map") {
  std::vector<ScalarGraph> graphs;
  for (const char* name : kCatalogNames) graphs.push_back(catalog(name).graph);
  graphs.push_back(ScalarGraph::log_ratio(0.7));
  for (const auto& g : graphs)
    for (double eps : {1e-2, 0.5})
      for (double r : {-3.0, -0.8, 0.4, 1.0, 2.5}) {
        double quad = oracle::simpson([&](double s) { return yosida(g, eps, s); },
                                      0.0, r, 1e-11);
        CHECK(moreau_primitive(g, eps, r) ==
              doctest::Approx(quad).epsilon(1e-9).scale(std::max(1.0, std::fabs(quad))));
      }
}

TEST_CASE("scaling transform: examples and Yosida identity") {
  auto lin = ScalarGraph::linear();
  CHECK(yosida(scaled(lin, 2.0), 1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-14));

  // b = 1 leaves the graph unchanged
  auto same = scaled(ScalarGraph::cubic(), 1.0);
  for (double r : linspace(-3.0, 3.0, 31))
    CHECK(yosida(same, 0.1, r) == yosida(ScalarGraph::cubic(), 0.1, r));

  // infinite segments of the indicator scale to themselves
  auto ind = ScalarGraph::interval_indicator();
  auto ind5 = scaled(ind, 5.0);
  for (double r : linspace(-3.0, 3.0, 31))
    CHECK(resolvent(ind5, 0.5, r) == resolvent(ind, 0.5, r));

  std::vector<ScalarGraph> graphs{ScalarGraph::linear(), ScalarGraph::cubic(),
                                  ScalarGraph::interval_indicator()};
  for (const auto& g : graphs)
    for (double b : {0.5, 2.0, 10.0})
      for (double eps : {1e-1, 1e-2, 1e-3}) {
        auto gb = scaled(g, b);
        for (double r : linspace(-5.0, 5.0, 101))
          CHECK(std::fabs(yosida(gb, eps, r) - b * yosida(g, b * eps, r)) <= 1e-12);
      }
}

TEST_CASE("shift transform: oracle value and Yosida identity") {
  auto lin = ScalarGraph::linear();
  // oracle check of the flagged example: both routes give 1.5
  double direct = yosida(shifted(lin, 1.0), 1.0, 2.0);
  double viaid = yosida(lin, 1.0, 2.0 - 1.0) + 1.0;
  double oracle_val = (2.0 - oracle::resolvent(shifted(lin, 1.0), 1.0, 2.0)) / 1.0;
  CHECK(direct == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(viaid == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(oracle_val == doctest::Approx(1.5).epsilon(1e-9));

  // a = 0 leaves the graph unchanged
  auto same = shifted(ScalarGraph::interval_indicator(), 0.0);
  for (double r : linspace(-3.0, 3.0, 31))
    CHECK(yosida(same, 0.25, r) == yosida(ScalarGraph::interval_indicator(), 0.25, r));

  // interior points of the shifted indicator map to the shift value
  auto ind_shift = shifted(ScalarGraph::interval_indicator(), 0.5);
  CHECK(yosida(ind_shift, 0.5, 0.2) == doctest::Approx(0.5).epsilon(1e-14));

  std::vector<ScalarGraph> graphs{ScalarGraph::linear(), ScalarGraph::cubic(),
                                  ScalarGraph::interval_indicator()};
  for (const auto& g : graphs)
    for (double a : {-1.0, 0.5})
      for (double eps : {1e-1, 1e-2, 1e-3}) {
        auto ga = shifted(g, a);
        for (double r : linspace(-5.0, 5.0, 101))
          CHECK(std::fabs(yosida(ga, eps, r) - (yosida(g, eps, r - eps * a) + a)) <=
                1e-12);
      }
}

TEST_CASE("shift identity on a single-point-domain graph") {
  auto g = ScalarGraph::from_pieces({SegmentPiece{0.0, -kInf, kInf}});
  CHECK(g.domain().lo == 0.0);
  CHECK(g.domain().hi == 0.0);
  for (double a : {-1.0, 0.5})
    for (double eps : {1e-1, 1e-3}) {
      auto ga = shifted(g, a);
      for (double r : linspace(-4.0, 4.0, 41)) {
        CHECK(resolvent(ga, eps, r) == 0.0);
        CHECK(std::fabs(yosida(ga, eps, r) - (yosida(g, eps, r - eps * a) + a)) <= 1e-11);
      }
    }
}

TEST_CASE("catalog: contents and frozen values") {
  auto dw = catalog("double_well");
  CHECK(minimal_section(dw.graph, 1.0) + dw.pi(1.0) == doctest::Approx(0.0));
  CHECK(dw.primitive(2.0) == doctest::Approx(4.0));
  CHECK(dw.pi.lipschitz() == 1.0);

  auto ob = catalog("double_obstacle");
  CHECK(minimal_section(ob.graph, 0.0) == 0.0);
  CHECK(ob.pi(0.0) == 0.0);
  CHECK(ob.primitive(0.7) == 0.0);
  CHECK(ob.primitive(1.2) == kInf);

  auto lt = catalog("linear_test");
  CHECK(lt.pi.lipschitz() == 0.0);
  CHECK(lt.primitive(2.0) == doctest::Approx(2.0));

  CHECK_THROWS_AS((void)catalog("logarithmic"), std::invalid_argument);
}

TEST_CASE("potential pairs: convex nonnegative primitive, Lipschitz perturbation") {
  for (const char* name : kCatalogNames) {
    auto p = catalog(name);
    CHECK(p.primitive(0.0) == 0.0);
    CHECK(p.graph.value_at_zero_contains_zero());
    const Interval& d = p.graph.domain();
    auto rs = linspace(std::max(d.lo, -4.0), std::min(d.hi, 4.0), 41);
    for (size_t i = 0; i + 2 < rs.size(); ++i) {
      double a = p.primitive(rs[i]), m = p.primitive(rs[i + 1]), b = p.primitive(rs[i + 2]);
      CHECK(a >= 0.0);
      CHECK(m <= 0.5 * (a + b) + 1e-12);  // midpoint convexity on a uniform grid
    }
    for (size_t i = 0; i + 1 < rs.size(); ++i)
      CHECK(std::fabs(p.pi(rs[i + 1]) - p.pi(rs[i])) <=
            p.pi.lipschitz() * (rs[i + 1] - rs[i]) + 1e-14);
  }
}

TEST_CASE("check_compatibility: certified pairs") {
  auto cubic = catalog("double_well").graph;
  auto ind = catalog("double_obstacle").graph;

  auto samples = default_compatibility_samples(ind);
  auto rep = check_compatibility(cubic, ind, samples);
  CHECK(rep.domain_ok);
  CHECK(rep.holds);
  CHECK(rep.eta == doctest::Approx(1.0));
  CHECK(rep.c_gamma == doctest::Approx(1.0));
  // (eta, C) = (1, 1) suffices on [-1,1]: |r^3| <= 1 there
  for (double r : samples)
    CHECK(std::fabs(minimal_section(cubic, r)) <=
          1.0 * std::fabs(minimal_section(ind, r)) + 1.0 + 1e-12);

  auto rep2 = check_compatibility(ind, ind, samples);
  CHECK(rep2.holds);
  CHECK(rep2.c_gamma == 0.0);
}

TEST_CASE("check_compatibility: domain rejection with witness") {
  auto logb = ScalarGraph::log_ratio(1.0);
  auto ind = catalog("double_obstacle").graph;
  auto samples = default_compatibility_samples(ind);
  auto rep = check_compatibility(logb, ind, samples);
  CHECK(!rep.domain_ok);
  CHECK(!rep.holds);
  REQUIRE(rep.witness.has_value());
  CHECK(std::fabs(std::fabs(*rep.witness) - 1.0) <= 1e-12);
}

TEST_CASE("check_compatibility: Lemma-4.4-style transfer for certified pairs") {
  auto cubic = catalog("double_well").graph;
  auto ind = catalog("double_obstacle").graph;
  auto samples = default_compatibility_samples(ind);
  auto rep = check_compatibility(cubic, ind, samples);
  REQUIRE(rep.holds);
  for (double eps : {1e-1, 1e-2, 1e-3})
    for (double r : linspace(-5.0, 5.0, 201)) {
      double lhs = std::fabs(yosida(cubic, eps, r));
      double rhs = rep.eta * std::fabs(boundary_yosida(ind, eps, rep.eta, r)) + rep.c_gamma;
      CHECK(lhs <= rhs + 1e-10 * std::max(1.0, lhs));
    }
}

TEST_CASE("check_compatibility: rejects samples outside the boundary domain") {
  auto cubic = catalog("double_well").graph;
  auto ind = catalog("double_obstacle").graph;
  std::vector<double> bad{0.0, 2.0};
  CHECK_THROWS_AS((void)check_compatibility(cubic, ind, bad), std::invalid_argument);
}

TEST_CASE("graph construction: invalid piece lists are rejected") {
  // gap between branches
  CHECK_THROWS_AS((void)ScalarGraph::from_pieces(
                      {BranchPiece{{-kInf, 0.0, false, true}, {BranchKind::Linear, 1.0, 0.0}},
                       BranchPiece{{1.0, kInf, true, false}, {BranchKind::Linear, 1.0, 0.0}}}),
                  std::invalid_argument);
  // junction owned twice
  CHECK_THROWS_AS((void)ScalarGraph::from_pieces(
                      {BranchPiece{{-kInf, 0.0, false, true}, {BranchKind::Linear, 1.0, 0.0}},
                       BranchPiece{{0.0, kInf, true, false}, {BranchKind::Linear, 1.0, 0.0}}}),
                  std::invalid_argument);
  // decreasing branch
  CHECK_THROWS_AS((void)ScalarGraph::from_pieces(
                      {BranchPiece{{-kInf, kInf, false, false}, {BranchKind::Linear, -1.0, 0.0}}}),
                  std::invalid_argument);
  // value gap at a junction (would not be maximal)
  CHECK_THROWS_AS((void)ScalarGraph::from_pieces(
                      {BranchPiece{{-kInf, 0.0, false, true}, {BranchKind::Linear, 1.0, 0.0}},
                       BranchPiece{{0.0, kInf, false, false}, {BranchKind::Linear, 1.0, 5.0}}}),
                  std::invalid_argument);
  // segment with lo > hi
  CHECK_THROWS_AS((void)ScalarGraph::from_pieces({SegmentPiece{0.0, 1.0, -1.0}}),
                  std::invalid_argument);
}
