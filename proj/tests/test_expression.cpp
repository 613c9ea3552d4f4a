#include "doctest.h"

#include "gcfl/expression.hpp"
#include "gcfl/spec_file.hpp"

#include <array>
#include <cmath>
#include <random>

using namespace gcfl;

namespace {

double eval1(const std::string& text, double x) { return Expression::parse(text, {"x"})(x); }

}  // namespace

TEST_CASE("arithmetic precedence and associativity") {
  CHECK(eval1("1+2*3", 0) == 7.0);
  CHECK(eval1("-x^2", 3) == -9.0);
  CHECK(eval1("2^3^2", 0) == 512.0);
  CHECK(eval1("x**2", 4) == 16.0);
  CHECK(eval1("(1+x)/(1-x)", 0.5) == doctest::Approx(3.0));
  CHECK(eval1("2*pi", 0) == doctest::Approx(2 * M_PI));
  CHECK(eval1("x^-2", 2) == 0.25);
  CHECK(eval1("abs(x)", -1.5) == 1.5);
  CHECK(eval1("ln(exp(x))", 0.7) == doctest::Approx(0.7));
}

TEST_CASE("integer powers accept negative bases") {
  CHECK(eval1("x^3", -2) == -8.0);
  CHECK_THROWS_AS(eval1("x^0.5", -2), DomainError);
}

TEST_CASE("domain errors surface at evaluation") {
  CHECK_THROWS_AS(eval1("log(x)", 0.0), DomainError);
  CHECK_THROWS_AS(eval1("log(1-x^2)", 1.0), DomainError);
  CHECK_THROWS_AS(eval1("sqrt(x)", -1e-3), DomainError);
  CHECK_THROWS_AS(eval1("1/x", 0.0), DomainError);
}

TEST_CASE("parse errors carry line and column") {
  try {
    Expression::parse("x^2 + * 3", {"x"}, 4, 10);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 10 + 6);
  }
  CHECK_THROWS_AS(Expression::parse("sin x", {"x"}), ParseError);
  CHECK_THROWS_AS(Expression::parse("w+1", {"x", "y", "z"}), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x+1", {"x"}), ParseError);
}

TEST_CASE("Taylor jets give exact derivatives") {
  using Jet = ad::Taylor<double, 4>;
  // u = sin(2x) * exp(x): compare with closed-form derivatives.
  const auto e = Expression::parse("sin(2*x)*exp(x)", {"x"});
  const double x = 0.37;
  const Jet var = Jet::variable(x);
  const Jet u = e.evaluate<Jet>(std::span<const Jet>(&var, 1));
  const double s = std::sin(2 * x), c = std::cos(2 * x), ex = std::exp(x);
  CHECK(u.derivative(0) == doctest::Approx(s * ex).epsilon(1e-14));
  CHECK(u.derivative(1) == doctest::Approx((s + 2 * c) * ex).epsilon(1e-13));
  CHECK(u.derivative(2) == doctest::Approx((4 * c - 3 * s) * ex).epsilon(1e-13));
  CHECK(u.derivative(3) == doctest::Approx((-11 * s - 2 * c) * ex).epsilon(1e-13));
  CHECK(u.derivative(4) == doctest::Approx((-24 * c - 7 * s) * ex).epsilon(1e-13));
}

TEST_CASE("sqrt, log, real powers on jets") {
  using Jet = ad::Taylor<double, 3>;
  const double x = 0.6;
  const Jet var = Jet::variable(x);
  auto run = [&](const char* text) {
    return Expression::parse(text, {"x"}).evaluate<Jet>(std::span<const Jet>(&var, 1));
  };
  // sqrt(1-x^2): f' = -x/f, f'' = -1/f^3
  const Jet circ = run("sqrt(1-x^2)");
  const double f = std::sqrt(1 - x * x);
  CHECK(circ.derivative(1) == doctest::Approx(-x / f));
  CHECK(circ.derivative(2) == doctest::Approx(-1 / (f * f * f)));
  CHECK(circ.derivative(3) == doctest::Approx(-3 * x / std::pow(f, 5)));
  const Jet lg = run("log(1+4*x^2)");
  CHECK(lg.derivative(1) == doctest::Approx(8 * x / (1 + 4 * x * x)));
  const Jet pw = run("x^1.5");
  CHECK(pw.derivative(2) == doctest::Approx(0.75 / std::sqrt(x)));
}

TEST_CASE("second-order duals agree with univariate jets on random compositions") {
  // Property: for f(x, y, z) restricted to a line x0 + t*d, the Hessian
  // contraction d^T H d equals the second derivative of the jet along t.
  const auto e = Expression::parse("sqrt(x^2+y^2+1)*cos(z*y) - log(2+x^2)/(1+z^2) + x*y*z",
                                   {"x", "y", "z"});
  const auto line = Expression::parse(
      "sqrt((a+d1*t)^2+(b+d2*t)^2+1)*cos((c+d3*t)*(b+d2*t)) - log(2+(a+d1*t)^2)/(1+(c+d3*t)^2) + "
      "(a+d1*t)*(b+d2*t)*(c+d3*t)",
      {"t", "a", "b", "c", "d1", "d2", "d3"});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  using D = ad::Dual2<double, 3>;
  using Jet = ad::Taylor<double, 2>;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d x0(U(rng), U(rng), U(rng));
    const Eigen::Vector3d d(U(rng), U(rng), U(rng));
    const std::array<D, 3> v = {D::variable(x0(0), 0), D::variable(x0(1), 1), D::variable(x0(2), 2)};
    const D f = e.evaluate<D>(v);
    std::array<Jet, 7> args = {Jet::variable(0.0), Jet(x0(0)), Jet(x0(1)), Jet(x0(2)),
                               Jet(d(0)),          Jet(d(1)),  Jet(d(2))};
    const Jet g = line.evaluate<Jet>(args);
    CHECK(g.derivative(0) == doctest::Approx(f.v).epsilon(1e-13));
    CHECK(g.derivative(1) == doctest::Approx(f.g.dot(d)).epsilon(1e-12));
    CHECK(g.derivative(2) == doctest::Approx(d.dot(f.H * d)).epsilon(1e-11));
    CHECK((f.H - f.H.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("spec documents parse one-liners and sections") {
  const auto doc = parse_document("kind=\"torus\" a=3 b=1\n[state]\np = [0, 0, 1] # tube\n");
  CHECK(doc.string("surface", "kind") == "torus");
  CHECK(doc.number("surface", "a") == 3.0);
  CHECK(doc.list("state", "p") == std::vector<double>{0, 0, 1});
  CHECK_THROWS_AS(doc.number("surface", "kind"), ParseError);

  try {
    parse_document("[surface]\nkind = \"torus\"\na = = 3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(parse_document("a = 1\na = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_document("f = \"x^2\n"), ParseError);
}

TEST_CASE("spec documents round-trip through text") {
  const auto doc = parse_document(
      "[surface]\nkind = \"implicit\"\nf = \"x^2+y^2+z^2-1\"\nhbar = 0.1\ndomain = [0.15, 1.4]\n"
      "[state]\nx = [0.1, 1e-300, -7.25]\n");
  const auto again = parse_document(to_text(doc));
  CHECK(to_text(again) == to_text(doc));
  CHECK(again.list("state", "x") == doc.list("state", "x"));
  CHECK(again.number("surface", "hbar") == 0.1);
}
