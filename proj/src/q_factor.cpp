#include "gcfl/q_factor.hpp"

#include "gcfl/autodiff.hpp"
#include "gcfl/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace gcfl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2m1 = std::numbers::sqrt2 - 1.0;

double coefficient_scale(const CurveJet& j) {
  const double geo = 1.0 + std::abs(j.u1) + j.g;
  const double curv = 1.0 + std::abs(j.kappa) + std::abs(j.dkappa) + std::abs(j.ddkappa);
  return geo * geo * curv * curv * curv;
}

void finish(ODEResidualReport& r) {
  r.max_abs_residual = 0.0;
  r.singular_points = 0;
  for (double v : r.residuals) {
    if (std::isnan(v)) ++r.singular_points;
    else r.max_abs_residual = std::max(r.max_abs_residual, std::abs(v));
  }
}

PlaneCurve case_curve(const ClosedFormCase& c) { return PlaneCurve::parse(c.curve, c.lo, c.hi); }

}  // namespace

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

Axis parse_axis(std::string_view text) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  if (text == "z") return Axis::z;
  throw ValidationError("component must be x, y or z, got '" + std::string(text) + "'");
}

std::string_view equation_id(QEquation eq) {
  switch (eq) {
    case QEquation::quadratic_x: return "quadratic-x";
    case QEquation::quadratic_y: return "quadratic-y";
    case QEquation::first_order_x: return "first-order-x";
    case QEquation::first_order_y: return "first-order-y";
    case QEquation::torus_xy: return "torus-xy";
    case QEquation::torus_z: return "torus-z";
    case QEquation::torus_pde_first: return "torus-pde-first";
    case QEquation::torus_pde_third: return "torus-pde-third";
  }
  return "?";
}

CurveJet curve_jet(const PlaneCurve& curve, double x) {
  using J = ad::Taylor<double, 2>;
  const auto d = curve.derivatives(x);
  J u1, u2;
  u1.c = {d[1], d[2], d[3] / 2};
  u2.c = {d[2], d[3], d[4] / 2};
  const J kappa = u2 * pow(J(1.0) + u1 * u1, -1.5);
  CurveJet j;
  j.u1 = d[1];
  j.u2 = d[2];
  j.g = std::sqrt(1.0 + d[1] * d[1]);
  j.kappa = kappa.derivative(0);
  j.dkappa = kappa.derivative(1);
  j.ddkappa = kappa.derivative(2);
  return j;
}

QuadraticCoefficients quadratic_cylinder(const PlaneCurve& curve, double x, Axis i) {
  if (i == Axis::z) throw ValidationError("cylinder equations exist for components x and y only");
  const auto j = curve_jet(curve, x);
  const double u1 = j.u1, g = j.g, k = j.kappa, k1 = j.dkappa, k2 = j.ddkappa;
  QuadraticCoefficients q;
  if (i == Axis::x) {
    q.a = 4 * k * u1;
    q.b = 4 * (u1 * k1 - g * k * k);
    q.c = u1 * k2 + 2 * g * k * k1 - g * u1 * u1 * k * k1;
  } else {
    q.a = 4 * k;
    q.b = 4 * (g * k * k * u1 - k1);
    q.c = k2 - 3 * g * u1 * k * k1;
  }
  const double tiny = 1e-12 * coefficient_scale(j);
  q.trivial = std::abs(q.a) <= tiny && std::abs(q.b) <= tiny && std::abs(q.c) <= tiny;
  q.singular = !q.trivial && std::abs(q.a) <= tiny;
  return q;
}

double residual_quadratic_cylinder(const PlaneCurve& curve, double qprime, double x, Axis i) {
  const auto q = quadratic_cylinder(curve, x, i);
  if (q.trivial) return 0.0;
  if (q.singular)
    throw SingularityError("quadratic equation for q_" + std::string(to_string(i)) +
                               " divides by zero (kappa = 0 or u' = 0) at x = " + format_number(x),
                           x);
  return qprime * qprime + q.b / q.a * qprime + q.c / q.a;
}

std::array<double, 2> quadratic_roots_cylinder(const PlaneCurve& curve, double x, Axis i) {
  const auto q = quadratic_cylinder(curve, x, i);
  if (q.trivial || q.singular)
    throw SingularityError("quadratic equation has no isolated roots at x = " + format_number(x), x);
  const double B = q.b / q.a, C = q.c / q.a;
  const double disc = B * B - 4 * C;
  if (disc < 0.0) return {kNaN, kNaN};
  // Stable form: avoid cancellation in the smaller root.
  const double t = -0.5 * (B + std::copysign(std::sqrt(disc), B));
  std::array<double, 2> r;
  if (t == 0.0) {
    r = {0.0, 0.0};
  } else {
    r = {t, C / t};
  }
  if (r[0] > r[1]) std::swap(r[0], r[1]);
  return r;
}

FirstOrderTerms first_order_cylinder(const PlaneCurve& curve, double x, Axis i) {
  if (i == Axis::z) throw ValidationError("cylinder equations exist for components x and y only");
  const auto j = curve_jet(curve, x);
  const double u1 = j.u1, g = j.g, k = j.kappa, k1 = j.dkappa, k2 = j.ddkappa;
  const double common = 2 * g * g * k * k * k + g * k * k1 * u1 - k2;
  FirstOrderTerms t;
  if (i == Axis::x) {
    t.numerator = u1 * common;
    t.denominator = 4 * (g * k1 + k1 * k1 * u1);
  } else {
    t.numerator = common;
    t.denominator = 4 * (k1 - g * k * k * u1);
  }
  const double tiny = 1e-10 * coefficient_scale(j);
  t.singular = std::abs(t.denominator) <= tiny;
  t.trivial = t.singular && std::abs(t.numerator) <= tiny;
  return t;
}

double rhs_first_order_cylinder(const PlaneCurve& curve, double x, Axis i) {
  const auto t = first_order_cylinder(curve, x, i);
  if (t.singular)
    throw SingularityError(std::string(t.trivial ? "indeterminate 0/0" : "vanishing denominator") +
                               " in the first-order equation for q_" + std::string(to_string(i)) +
                               " at x = " + format_number(x),
                           x);
  return t.numerator / t.denominator;
}

const std::vector<ClosedFormCase>& closed_form_cases() {
  static const std::vector<ClosedFormCase> cases = {
      {"plane", "x", "0", "0", -kInf, kInf},
      {"circle", "sqrt(1-x^2)", "-(1/4)*log(1-x^2)", "-(1/2)*log(abs(x))", -1.0, 1.0},
      {"parabola", "x^2", "5/8*log((1+4*x^2))", "(5/8)*log(1+4*x^2)-(5/16)*log(abs(x))", -kInf, kInf},
      {"hyperbola", "sqrt(x^2-1)", "-1/7*log(x^2-1)+5/8*log(2*x^2-1)+1/56*log(6*x^2+1)",
       "-2/7*log(x)+5/8*log(2*x^2-1)+1/56*log(abs(6*x^2-7))", 1.0, kInf},
      {"sine", "sin(x)",
       "5/8*log(cos(2*x)+3)-(1+4/sqrt(17))/8*log(abs(2*cos(2*x)-sqrt(17)-3))"
       "-(1-4/sqrt(17))/8*log(abs(2*cos(2*x)+sqrt(17)-3))",
       "-3/10*log(abs(2*cos(x)))+5/8*log(3+cos(2*x))-9/40*log(7-3*cos(2*x))", -kInf, kInf},
  };
  return cases;
}

const ClosedFormCase& closed_form_case(std::string_view name) {
  for (const auto& c : closed_form_cases())
    if (c.name == name) return c;
  throw ValidationError("unknown closed-form case '" + std::string(name) +
                        "' (expected plane, circle, parabola, hyperbola or sine)");
}

std::pair<double, double> closed_form_q_jet(std::string_view name, Axis i, double x) {
  const auto& c = closed_form_case(name);
  if (i == Axis::z) throw ValidationError("closed forms are listed for q_x and q_y only");
  if (!(x >= c.lo && x <= c.hi))
    throw DomainError("x = " + format_number(x) + " is outside the " + c.name + " domain");
  static thread_local std::vector<std::pair<std::string, Expression>> cache;
  const std::string& text = i == Axis::x ? c.q_x : c.q_y;
  auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& e) { return e.first == text; });
  if (it == cache.end()) {
    cache.emplace_back(text, Expression::parse(text, {"x"}));
    it = std::prev(cache.end());
  }
  using J = ad::Taylor<double, 1>;
  const J var = J::variable(x);
  const J q = it->second.evaluate<J>(std::span<const J>(&var, 1));
  return {q.derivative(0), q.derivative(1)};
}

double closed_form_q(std::string_view name, Axis i, double x) { return closed_form_q_jet(name, i, x).first; }

std::pair<ODEResidualReport, ODEResidualReport> verify_closed_forms(std::string_view name, Axis i,
                                                                    const std::vector<double>& grid) {
  const auto& c = closed_form_case(name);
  const PlaneCurve curve = case_curve(c);
  ODEResidualReport quad, first;
  quad.case_name = first.case_name = c.name;
  quad.equation = equation_id(i == Axis::x ? QEquation::quadratic_x : QEquation::quadratic_y);
  first.equation = equation_id(i == Axis::x ? QEquation::first_order_x : QEquation::first_order_y);
  quad.grid = first.grid = grid;
  for (double x : grid) {
    const double qp = closed_form_q_jet(name, i, x).second;

    double rq = kNaN;
    try {
      rq = residual_quadratic_cylinder(curve, qp, x, i);
    } catch (const SingularityError&) {
    }
    quad.residuals.push_back(rq);
    quad.lhs.push_back(qp);

    const auto t = first_order_cylinder(curve, x, i);
    first.lhs.push_back(qp);
    if (t.trivial) {
      // Cleared form den * q' - num: exact zero for a trivial equation.
      first.rhs.push_back(kNaN);
      first.residuals.push_back(t.denominator * qp - t.numerator);
    } else if (t.singular) {
      first.rhs.push_back(kNaN);
      first.residuals.push_back(kNaN);
    } else {
      const double rhs = t.numerator / t.denominator;
      first.rhs.push_back(rhs);
      first.residuals.push_back(qp - rhs);
    }
  }
  finish(quad);
  finish(first);
  return {quad, first};
}

TorusOdeTerms torus_ode_terms(double a, double b, double theta, Axis i) {
  if (!(a > b && b > 0.0)) throw ValidationError("torus requires a > b > 0");
  const double s = std::sin(theta), c = std::cos(theta);
  const double rho = a + b * s;
  const double rho3 = rho * rho * rho;
  TorusOdeTerms t;
  if (i == Axis::z) {
    t.coefficient = 4 * kSqrt2m1 * (std::cos(2 * theta) + 3) * rho3;
    t.inhomogeneous = (7 * a * (2 * a * a + 3 * b * b) + 6 * b * (7 * a * a + b * b) * s -
                       21 * a * b * b * std::cos(2 * theta) - 2 * b * b * b * std::sin(3 * theta)) *
                      c / s;
  } else {
    t.coefficient = 16 * kSqrt2m1 * c * rho3;
    t.inhomogeneous = (2 * a * (2 * a * a + 3 * b * b) + 6 * b * (2 * a * a - b * b) * s -
                       6 * a * b * b * std::cos(2 * theta) + 2 * b * b * b * std::sin(3 * theta)) /
                      s;
  }
  return t;
}

double rhs_torus(double a, double b, double theta, Axis i) {
  if (std::abs(std::sin(theta)) <= 1e-12)
    throw SingularityError("torus equation singular at sin(theta) = 0, theta = " + format_number(theta), theta);
  const auto t = torus_ode_terms(a, b, theta, i);
  if (i != Axis::z && std::abs(std::cos(theta)) <= 1e-12)
    throw SingularityError("torus equation for q_" + std::string(to_string(i)) +
                               " singular at cos(theta) = 0 (inhomogeneous term " +
                               format_number(t.inhomogeneous) + "), theta = " + format_number(theta),
                           theta);
  return -t.inhomogeneous / t.coefficient;
}

bool torus_singular(double theta, Axis i, double margin) {
  const double pi = std::numbers::pi;
  const double step = i == Axis::z ? pi : pi / 2;
  const double k = std::round(theta / step);
  return std::abs(theta - k * step) < margin;
}

namespace {

std::optional<double> torus_singular_point(double lo, double hi, Axis i, double margin) {
  const double pi = std::numbers::pi;
  const double step = i == Axis::z ? pi : pi / 2;
  for (double k = std::floor((lo - margin) / step); k * step <= hi + margin; k += 1.0) {
    const double p = k * step;
    if (p >= lo - margin && p <= hi + margin) return p;
  }
  return std::nullopt;
}

}  // namespace

QFactorProfile solve_q(const QFactorRequest& req) {
  if (req.samples < 2) throw ValidationError("samples must be at least 2");
  if (!(req.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (!(req.margin >= 0.0)) throw ValidationError("margin must be nonnegative");

  QFactorProfile prof;
  prof.component = req.component;
  prof.tolerance = req.tolerance;
  std::array<double, 2> dom{};
  std::function<double(double, double)> rhs;

  if (req.surface.kind == SurfaceKind::torus) {
    const double a = req.surface.torus->a, b = req.surface.torus->b;
    prof.coordinate = QCoordinate::theta;
    dom = req.domain.value_or(std::array<double, 2>{0.15, 1.40});
    if (const auto p = torus_singular_point(dom[0], dom[1], req.component, req.margin))
      throw SingularityError("domain [" + format_number(dom[0]) + ", " + format_number(dom[1]) +
                                 "] reaches the singular point theta = " + format_number(*p) + " of the q_" +
                                 std::string(to_string(req.component)) + " equation",
                             *p);
    const Axis comp = req.component == Axis::y ? Axis::x : req.component;  // identical equations
    rhs = [a, b, comp](double t, double) { return rhs_torus(a, b, t, comp); };
    prof.anchor = req.anchor.value_or(std::numbers::pi / 4);
  } else if (req.surface.kind == SurfaceKind::plane_curve_cylinder) {
    const PlaneCurve curve = *req.surface.curve;
    if (req.component == Axis::z) throw ValidationError("cylinder dummy factors exist for x and y only");
    const Axis comp = req.component;
    prof.coordinate = QCoordinate::x;
    dom = req.domain.value_or(std::array<double, 2>{curve.lo(), curve.hi()});
    if (!(curve.contains(dom[0]) && curve.contains(dom[1])))
      throw DomainError("profile domain leaves the curve domain");
    // Scan the margin-extended domain for zeros of the denominator.
    const double lo = std::max(curve.lo(), dom[0] - req.margin), hi = std::min(curve.hi(), dom[1] + req.margin);
    const int scan = 4000;
    double prev_den = 0.0, prev_x = lo;
    for (int k = 0; k <= scan; ++k) {
      const double x = lo + (hi - lo) * k / scan;
      const auto t = first_order_cylinder(curve, x, comp);
      if (t.trivial) continue;
      if (t.singular || (prev_den != 0.0 && std::signbit(prev_den) != std::signbit(t.denominator))) {
        const double where = t.singular ? x : 0.5 * (x + prev_x);
        throw SingularityError("first-order equation for q_" + std::string(to_string(comp)) +
                                   " is singular near x = " + format_number(where),
                               where);
      }
      prev_den = t.denominator;
      prev_x = x;
    }
    rhs = [curve, comp](double x, double) {
      const auto t = first_order_cylinder(curve, x, comp);
      if (t.trivial) return 0.0;
      if (t.singular) throw SingularityError("vanishing denominator", x);
      return t.numerator / t.denominator;
    };
    prof.anchor = req.anchor.value_or(0.5 * (dom[0] + dom[1]));
  } else {
    throw ValidationError("solve_q needs a torus or a plane-curve cylinder surface");
  }
  if (!(dom[0] < dom[1])) throw ValidationError("domain must be increasing");
  if (!(prof.anchor >= dom[0] && prof.anchor <= dom[1])) throw ValidationError("anchor must lie in the domain");

  if (!req.points.empty()) {
    if (!std::is_sorted(req.points.begin(), req.points.end()) || req.points.front() < dom[0] ||
        req.points.back() > dom[1])
      throw ValidationError("sample points must be increasing and inside the domain");
    prof.grid = req.points;
  } else {
    for (int k = 0; k < req.samples; ++k)
      prof.grid.push_back(k == req.samples - 1 ? dom[1] : dom[0] + (dom[1] - dom[0]) * k / (req.samples - 1));
  }
  if (!std::binary_search(prof.grid.begin(), prof.grid.end(), prof.anchor))
    prof.grid.insert(std::upper_bound(prof.grid.begin(), prof.grid.end(), prof.anchor), prof.anchor);

  OdeOptions opt;
  opt.rtol = opt.atol = req.tolerance;
  const auto up = integrate_dopri5(rhs, prof.anchor, 0.0, dom[1], opt);
  const auto down = integrate_dopri5(rhs, prof.anchor, 0.0, dom[0], opt);
  for (double t : prof.grid) {
    if (t == prof.anchor) prof.values.push_back(0.0);
    else prof.values.push_back(t > prof.anchor ? up(t) : down(t));
  }
  return prof;
}

QFactorProfile shifted(const QFactorProfile& profile, double shift) {
  QFactorProfile out = profile;
  for (double& v : out.values) v += shift;
  return out;
}

void write_profile_csv(const QFactorProfile& profile, std::ostream& out) {
  out << "coord,q\n";
  for (std::size_t k = 0; k < profile.grid.size(); ++k)
    out << format_number(profile.grid[k]) << ',' << format_number(profile.values[k]) << '\n';
}

TorusPdeTerms torus_pde_terms(double a, double b, const Expression& candidate, double theta, double phi,
                              TorusPdeChoice choice) {
  if (!(a > b && b > 0.0)) throw ValidationError("torus requires a > b > 0");
  const double s = std::sin(theta);
  if (std::abs(s) <= 1e-12)
    throw SingularityError("second-order torus equation singular at sin(theta) = 0", theta);
  using D = ad::Dual2<double, 2>;
  const std::array<D, 2> vars = {D::variable(theta, 0), D::variable(phi, 1)};
  const D q = candidate.evaluate<D>(vars);
  const double qt = q.g(0), qp = q.g(1), qtt = q.H(0, 0);
  const double c = std::cos(theta), cp = std::cos(phi), sp = std::sin(phi);
  const double rho = a + b * s;
  const double rho3 = rho * rho * rho;
  const double b3 = b * b * b;
  TorusPdeTerms t;
  if (choice == TorusPdeChoice::third) {
    t.derivative_part = 8 * cp * rho3 * (c * qt - s * qt * qt) + 8 * b3 * s * s * (sp * qp - cp * qp * qp);
    t.inhomogeneous = -a / s * cp *
                      (6 * a * a + 3 * b * b + 10 * a * b * s + (4 * a * a - b * b) * std::cos(2 * theta) +
                       6 * a * b * std::sin(3 * theta) - 2 * b * b * std::cos(4 * theta));
  } else {
    t.derivative_part = 8 * cp * rho3 * (qt * qt + 2 * qtt) - 24 * b3 * s * (sp * qp + cp * qp * qp);
    t.inhomogeneous = -cp / (s * s) *
                      (a * (2 * a * a + 3 * b * b) + 3 * b * (2 * a * a - b * b) * s -
                       3 * a * b * b * std::cos(2 * theta) + b3 * std::sin(3 * theta));
  }
  t.residual = t.derivative_part + t.inhomogeneous;
  return t;
}

ODEResidualReport residual_torus_secondorder(double a, double b, const Expression& candidate, TorusPdeChoice choice,
                                             const std::vector<double>& thetas, const std::vector<double>& phis) {
  ODEResidualReport r;
  r.case_name = "torus";
  r.equation = equation_id(choice == TorusPdeChoice::first ? QEquation::torus_pde_first : QEquation::torus_pde_third);
  for (double th : thetas)
    for (double ph : phis) {
      r.grid.push_back(th);
      r.grid2.push_back(ph);
      try {
        const auto t = torus_pde_terms(a, b, candidate, th, ph, choice);
        r.lhs.push_back(t.derivative_part);
        r.rhs.push_back(t.inhomogeneous);
        r.residuals.push_back(t.residual);
      } catch (const SingularityError&) {
        r.lhs.push_back(kNaN);
        r.rhs.push_back(kNaN);
        r.residuals.push_back(kNaN);
      }
    }
  finish(r);
  return r;
}

}  // namespace gcfl
