#include "doctest.h"

#include "gcfl/plot.hpp"
#include "gcfl/q_factor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace gcfl;
using std::numbers::pi;

namespace {

PlaneCurve curve(const char* u, double lo, double hi) { return PlaneCurve::parse(u, lo, hi); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(lo + (hi - lo) * k / (n - 1));
  return v;
}

// Composite Simpson integral of the torus right-hand side.
double simpson_torus(double a, double b, Axis i, double from, double to, int n = 20000) {
  const double h = (to - from) / n;
  double s = rhs_torus(a, b, from, i) + rhs_torus(a, b, to, i);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * rhs_torus(a, b, from + k * h, i);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("curvature jets") {
  // Parabola: kappa = 2 g^-3, kappa' = -24 x g^-5
  const auto j = curve_jet(curve("x^2", -2, 2), 1.0);
  const double g = std::sqrt(5.0);
  CHECK(j.kappa == doctest::Approx(2 / (g * g * g)).epsilon(1e-14));
  CHECK(j.dkappa == doctest::Approx(-24 / std::pow(g, 5)).epsilon(1e-14));
  CHECK(j.ddkappa == doctest::Approx(-24 / std::pow(g, 5) + 480.0 / std::pow(g, 7)).epsilon(1e-13));
  const auto c = curve_jet(curve("sqrt(1-x^2)", -0.9, 0.9), 0.4);
  CHECK(c.kappa == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(c.dkappa) < 1e-13);
  CHECK(std::abs(c.ddkappa) < 1e-12);
}

TEST_CASE("quadratic cylinder equations") {
  const auto line = curve("x", -2, 2);
  CHECK(residual_quadratic_cylinder(line, 0.0, 0.3, Axis::x) == 0.0);
  CHECK(residual_quadratic_cylinder(line, 0.0, 0.3, Axis::y) == 0.0);
  CHECK(quadratic_cylinder(line, 0.3, Axis::x).trivial);

  const auto circle = curve("sqrt(1-x^2)", -0.95, 0.95);
  CHECK(std::abs(residual_quadratic_cylinder(circle, 0.0, 0.5, Axis::x)) < 1e-12);
  CHECK(std::abs(residual_quadratic_cylinder(circle, 0.0, 0.5, Axis::y)) < 1e-12);
  // With kappa' = kappa'' = 0 the quadratics factor as q'(q' - g kappa/u') and q'(q' + g kappa u').
  const auto j = curve_jet(circle, 0.5);
  const double root_x = j.g * j.kappa / j.u1, root_y = -j.g * j.kappa * j.u1;
  CHECK(root_x == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(root_y == doctest::Approx(-2.0 / 3.0).epsilon(1e-13));
  CHECK(std::abs(residual_quadratic_cylinder(circle, root_x, 0.5, Axis::x)) < 1e-12);
  CHECK(std::abs(residual_quadratic_cylinder(circle, root_y, 0.5, Axis::y)) < 1e-12);
  const auto rx = quadratic_roots_cylinder(circle, 0.5, Axis::x);
  CHECK(std::abs(rx[0]) < 1e-12);
  CHECK(rx[1] == doctest::Approx(2.0).epsilon(1e-12));
  // The value -g kappa/u' is not a root of the x equation.
  CHECK(std::abs(residual_quadratic_cylinder(circle, -root_x, 0.5, Axis::x)) > 1.0);

  CHECK_THROWS_AS(residual_quadratic_cylinder(circle, 0.1, 0.0, Axis::x), SingularityError);
  const auto sine = curve("sin(x)", -3, 3);
  CHECK_THROWS_AS(residual_quadratic_cylinder(sine, 0.1, 0.0, Axis::y), SingularityError);
}

TEST_CASE("first-order cylinder equations") {
  const auto parabola = curve("x^2", -2, 2);
  // Exact-fraction value of the printed right-hand side at x = 1.
  CHECK(rhs_first_order_cylinder(parabola, 1.0, Axis::x) == doctest::Approx(1.33099284374987).epsilon(1e-13));
  const double printed = -(44 / (25 * std::sqrt(5.0))) / (-24.0 / 25 + 1152.0 / 3125);
  CHECK(printed == doctest::Approx(1.3309).epsilon(1e-3));

  const auto circle = curve("sqrt(1-x^2)", -0.95, 0.95);
  CHECK_THROWS_AS(rhs_first_order_cylinder(circle, 0.5, Axis::x), SingularityError);
  CHECK_NOTHROW(rhs_first_order_cylinder(circle, 0.5, Axis::y));
  const auto line = curve("x", -2, 2);
  CHECK_THROWS_AS(rhs_first_order_cylinder(line, 0.5, Axis::x), SingularityError);
  CHECK_THROWS_AS(rhs_first_order_cylinder(line, 0.5, Axis::y), SingularityError);
  CHECK(first_order_cylinder(line, 0.5, Axis::x).trivial);
}

TEST_CASE("closed forms") {
  CHECK(closed_form_q("circle", Axis::x, 0.5) == doctest::Approx(-0.25 * std::log(0.75)).epsilon(1e-15));
  CHECK(closed_form_q("circle", Axis::x, 0.5) == doctest::Approx(0.071920).epsilon(1e-5));
  for (double x : {-3.0, 0.0, 2.5}) {
    CHECK(closed_form_q("plane", Axis::x, x) == 0.0);
    CHECK(closed_form_q("plane", Axis::y, x) == 0.0);
  }
  CHECK(closed_form_q("parabola", Axis::x, 1.0) == doctest::Approx(0.625 * std::log(5.0)).epsilon(1e-15));
  CHECK(closed_form_q_jet("parabola", Axis::x, 1.0).second == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(closed_form_q("hyperbola", Axis::y, 2.0) ==
        doctest::Approx(-2.0 / 7 * std::log(2.0) + 0.625 * std::log(7.0) + std::log(17.0) / 56).epsilon(1e-14));

  CHECK_THROWS_AS(closed_form_q("circle", Axis::x, 1.5), DomainError);
  CHECK_THROWS_AS(closed_form_q("circle", Axis::x, 1.0), DomainError);
  CHECK_THROWS_AS(closed_form_q("hyperbola", Axis::x, 0.5), DomainError);
  CHECK_THROWS_AS(closed_form_q("circle", Axis::y, 0.0), DomainError);
  CHECK_THROWS_AS(closed_form_q("ellipse", Axis::x, 0.0), ValidationError);
}

TEST_CASE("closed forms substituted into both equation families") {
  const auto grid = linspace(-1.5, 1.5, 31);
  for (Axis i : {Axis::x, Axis::y}) {
    const auto [quad, first] = verify_closed_forms("plane", i, grid);
    for (double r : quad.residuals) CHECK(r == 0.0);
    for (double r : first.residuals) CHECK(r == 0.0);
    CHECK(quad.singular_points == 0);
    CHECK(first.max_abs_residual == 0.0);
  }

  const auto [pq, pf] = verify_closed_forms("parabola", Axis::x, {1.0});
  CHECK(pf.equation == "first-order-x");
  CHECK(pf.lhs[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pf.rhs[0] == doctest::Approx(1.33099284374987).epsilon(1e-13));
  CHECK(pf.residuals[0] == doctest::Approx(1.0 - 1.33099284374987).epsilon(1e-12));
  CHECK(pq.residuals[0] == doctest::Approx(0.44).epsilon(1e-2));

  const auto cgrid = linspace(0.2, 0.9, 15);
  const auto [cq, cf] = verify_closed_forms("circle", Axis::y, cgrid);
  CHECK(cq.equation == "quadratic-y");
  CHECK(cq.singular_points == 0);
  for (std::size_t k = 0; k < cgrid.size(); ++k) CHECK(cq.lhs[k] == doctest::Approx(-1 / (2 * cgrid[k])));
  CHECK(cq.max_abs_residual > 0.0);
  // Circle x: every point of the first-order equation is singular.
  const auto [cxq, cxf] = verify_closed_forms("circle", Axis::x, cgrid);
  CHECK(cxf.singular_points == cgrid.size());
  CHECK(cxq.residuals[6] == doctest::Approx(-5.0 / 9.0).epsilon(1e-3));

  // The y closed forms satisfy the first-order y equation.
  for (const char* name : {"circle", "parabola", "hyperbola", "sine"}) {
    CAPTURE(name);
    const auto grid_y = std::string(name) == "hyperbola" ? linspace(1.2, 3.0, 19)
                        : std::string(name) == "circle"  ? linspace(0.2, 0.9, 15)
                                                         : linspace(0.2, 1.3, 12);
    const auto [q, f] = verify_closed_forms(name, Axis::y, grid_y);
    CHECK(f.singular_points == 0);
    CHECK(f.max_abs_residual < 1e-10);
  }
}

TEST_CASE("torus first-order equations") {
  CHECK(std::abs(rhs_torus(3, 1, pi / 2, Axis::z)) < 1e-15);
  CHECK_THROWS_AS(rhs_torus(3, 1, pi / 2, Axis::x), SingularityError);
  CHECK_THROWS_AS(rhs_torus(3, 1, 0.0, Axis::z), SingularityError);
  CHECK(torus_ode_terms(3, 1, pi / 2, Axis::x).inhomogeneous == doctest::Approx(244.0).epsilon(1e-14));
  CHECK(std::abs(torus_ode_terms(3, 1, pi / 2, Axis::x).coefficient) < 1e-12);
  CHECK(torus_ode_terms(3, 1, pi / 2, Axis::z).coefficient ==
        doctest::Approx(4 * (std::sqrt(2.0) - 1) * 2 * 64).epsilon(1e-14));
  for (double th : {0.2, 0.7, 1.1, 2.0, 4.0}) CHECK(rhs_torus(3, 1, th, Axis::x) == rhs_torus(3, 1, th, Axis::y));
  CHECK(torus_singular(pi / 2 + 0.01, Axis::x, 0.05));
  CHECK(!torus_singular(pi / 2 + 0.01, Axis::z, 0.05));
  CHECK(torus_singular(pi - 0.01, Axis::z, 0.05));
}

TEST_CASE("solve_q on the torus") {
  QFactorRequest req;
  req.surface = make_torus(3, 1);
  req.component = Axis::x;
  const auto qx = solve_q(req);
  req.component = Axis::y;
  const auto qy = solve_q(req);
  REQUIRE(qx.grid.size() == 202);
  CHECK(qx.values == qy.values);
  CHECK(qx.grid == qy.grid);
  const auto anchor = std::find(qx.grid.begin(), qx.grid.end(), pi / 4);
  REQUIRE(anchor != qx.grid.end());
  CHECK(qx.values[anchor - qx.grid.begin()] == 0.0);
  CHECK(std::is_sorted(qx.grid.begin(), qx.grid.end()));

  // Independent oracle: the right-hand side depends on theta only.
  for (std::size_t k = 0; k < qx.grid.size(); k += 20)
    CHECK(std::abs(qx.values[k] - simpson_torus(3, 1, Axis::x, pi / 4, qx.grid[k])) < 1e-9);
  req.component = Axis::z;
  const auto qz = solve_q(req);
  req.tolerance = 1e-12;
  const auto qz_fine = solve_q(req);
  req.tolerance = 1e-10;
  for (std::size_t k = 0; k < qz.grid.size(); k += 20) {
    const double oracle = simpson_torus(3, 1, Axis::z, pi / 4, qz.grid[k]);
    CHECK(std::abs(qz.values[k] - oracle) < 1e-8);
    CHECK(std::abs(qz_fine.values[k] - oracle) < 1e-10);
  }

  // Self-convergence between tolerance levels.
  req.component = Axis::x;
  req.tolerance = 1e-12;
  const auto fine = solve_q(req);
  req.tolerance = 1e-8;
  const auto coarse = solve_q(req);
  double d10 = 0, d8 = 0;
  for (std::size_t k = 0; k < fine.values.size(); ++k) {
    d10 = std::max(d10, std::abs(qx.values[k] - fine.values[k]));
    d8 = std::max(d8, std::abs(coarse.values[k] - fine.values[k]));
  }
  CHECK(d10 < 1e-8);
  CHECK(d10 < d8);

  const auto s = shifted(qx, 1.7);
  CHECK(s.values[5] == qx.values[5] + 1.7);
}

TEST_CASE("solve_q refuses singular domains") {
  QFactorRequest req;
  req.surface = make_torus(3, 1);
  req.component = Axis::x;
  req.domain = std::array<double, 2>{0.3, 2.0};
  try {
    solve_q(req);
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.location() == doctest::Approx(pi / 2));
  }
  req.component = Axis::z;
  CHECK_NOTHROW(solve_q(req));
  req.domain = std::array<double, 2>{0.02, 1.0};
  CHECK_THROWS_AS(solve_q(req), SingularityError);
  req.domain = std::array<double, 2>{0.15, 1.40};
  req.anchor = 2.0;
  CHECK_THROWS_AS(solve_q(req), ValidationError);
}

TEST_CASE("solve_q on cylinders") {
  QFactorRequest req;
  req.surface = make_cylinder("x", -1, 1);
  req.component = Axis::x;
  const auto zero = solve_q(req);
  for (double v : zero.values) CHECK(v == 0.0);
  CHECK(zero.coordinate == QCoordinate::x);

  // Parabola q_y from the first-order equation against the listed closed form (gauge-fixed at the anchor).
  req.surface = make_cylinder("x^2", 0.2, 1.5);
  req.component = Axis::y;
  req.domain = std::array<double, 2>{0.3, 1.4};
  req.tolerance = 1e-12;
  const auto py = solve_q(req);
  const double q0 = closed_form_q("parabola", Axis::y, py.anchor);
  for (std::size_t k = 0; k < py.grid.size(); k += 10)
    CHECK(std::abs(py.values[k] - (closed_form_q("parabola", Axis::y, py.grid[k]) - q0)) < 1e-9);

  // The parabola x equation vanishes in its denominator at x = 0.
  req.component = Axis::x;
  req.surface = make_cylinder("x^2", -1.5, 1.5);
  req.domain = std::array<double, 2>{-1, 1};
  CHECK_THROWS_AS(solve_q(req), SingularityError);
}

TEST_CASE("profile CSV") {
  QFactorRequest req;
  req.surface = make_torus(3, 1);
  req.component = Axis::z;
  req.samples = 5;
  std::ostringstream out;
  write_profile_csv(solve_q(req), out);
  const std::string text = out.str();
  CHECK(text.rfind("coord,q\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("second-order torus equations") {
  const auto zero = Expression::parse("0", {"theta", "phi"});
  const auto t = torus_pde_terms(3, 1, zero, 1.0, 0.4, TorusPdeChoice::third);
  CHECK(t.derivative_part == 0.0);
  CHECK(t.inhomogeneous != 0.0);
  CHECK(t.residual == t.inhomogeneous);
  const double s = std::sin(1.0);
  const double expected = -3 / s * std::cos(0.4) *
                          (54 + 3 + 30 * s + 35 * std::cos(2.0) + 18 * std::sin(3.0) - 2 * std::cos(4.0));
  CHECK(t.inhomogeneous == doctest::Approx(expected).epsilon(1e-14));

  // Derivatives of the candidate enter exactly.
  const auto cand = Expression::parse("theta^2*cos(phi)", {"theta", "phi"});
  const double th = 0.8, ph = 0.3;
  const auto f = torus_pde_terms(3, 1, cand, th, ph, TorusPdeChoice::first);
  const double qt = 2 * th * std::cos(ph), qtt = 2 * std::cos(ph), qp = -th * th * std::sin(ph);
  const double rho = 3 + std::sin(th);
  const double manual = 8 * std::cos(ph) * rho * rho * rho * (qt * qt + 2 * qtt) -
                        24 * std::sin(th) * (std::sin(ph) * qp + std::cos(ph) * qp * qp);
  CHECK(f.derivative_part == doctest::Approx(manual).epsilon(1e-13));

  // phi-independent candidates: residual / cos(phi) does not depend on phi.
  const auto radial = Expression::parse("log(2+sin(theta))", {"theta", "phi"});
  for (auto choice : {TorusPdeChoice::first, TorusPdeChoice::third}) {
    const double ref = torus_pde_terms(3, 1, radial, 1.1, 0.0, choice).residual;
    for (double phi : {0.3, 1.0, 2.5, 4.0})
      CHECK(torus_pde_terms(3, 1, radial, 1.1, phi, choice).residual / std::cos(phi) ==
            doctest::Approx(ref).epsilon(1e-12));
  }

  // Large-a scaling of the q-free term: cubic in a.
  for (auto choice : {TorusPdeChoice::first, TorusPdeChoice::third}) {
    const double t1 = std::abs(torus_pde_terms(1e3, 1, zero, pi / 2 - 0.1, 0.0, choice).inhomogeneous);
    const double t2 = std::abs(torus_pde_terms(1e4, 1, zero, pi / 2 - 0.1, 0.0, choice).inhomogeneous);
    CHECK(std::log10(t2 / t1) == doctest::Approx(3.0).epsilon(1e-3));
  }

  const auto report = residual_torus_secondorder(3, 1, zero, TorusPdeChoice::third, {0.0, 0.5, 1.0}, {0.0, 1.0});
  CHECK(report.equation == "torus-pde-third");
  CHECK(report.residuals.size() == 6);
  CHECK(report.singular_points == 2);
  CHECK(report.max_abs_residual > 0.0);
}

TEST_CASE("profile plot: solid x/y, dotted z") {
  QFactorRequest req;
  req.surface = make_torus(3, 1);
  req.samples = 41;
  req.component = Axis::x;
  const auto qx = solve_q(req);
  req.component = Axis::z;
  const auto qz = solve_q(req);
  std::ostringstream out;
  write_profiles_svg({qx, qz}, out, {"torus a=3, b=1", 640, 420});
  const std::string svg = out.str();
  CHECK(svg.rfind("<svg", 0) == 0);
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto p = svg.find(needle); p != std::string::npos; p = svg.find(needle, p + 1)) ++n;
    return n;
  };
  CHECK(count("<polyline") == 2);
  CHECK(count("data-component=\"z\"") == 1);
  CHECK(count("stroke-dasharray") == 2);  // curve and legend
  std::ostringstream again;
  write_profiles_svg({qx, qz}, again, {"torus a=3, b=1", 640, 420});
  CHECK(again.str() == svg);
}
