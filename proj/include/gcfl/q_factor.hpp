#pragma once

// Dummy factors q_i: the quadratic and first-order equations for cylinder
// cross-sections, the torus equations in theta, the listed closed forms, and
// residual reports that substitute candidates into each equation.

#include "gcfl/expression.hpp"
#include "gcfl/surface.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcfl {

enum class Axis { x, y, z };
std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

// u', u'', g = sqrt(1 + u'^2), kappa = u''/g^3 and two derivatives of kappa.
struct CurveJet {
  double u1 = 0.0, u2 = 0.0, g = 1.0;
  double kappa = 0.0, dkappa = 0.0, ddkappa = 0.0;
};
CurveJet curve_jet(const PlaneCurve& curve, double x);

// q'^2 + (b/a) q' + c/a = 0 with a the printed denominator (4 kappa u' for x, 4 kappa for y).
struct QuadraticCoefficients {
  double a = 0.0, b = 0.0, c = 0.0;
  bool singular = false;  // a vanishes while b or c does not
  bool trivial = false;   // a, b and c all vanish: every q' satisfies the equation
};
QuadraticCoefficients quadratic_cylinder(const PlaneCurve& curve, double x, Axis i);

// Left-hand side of the quadratic equation at q' (exactly 0 when the equation is trivial).
// SingularityError when the printed form divides by zero.
double residual_quadratic_cylinder(const PlaneCurve& curve, double qprime, double x, Axis i);

// Both roots of the quadratic (NaN pair if complex); SingularityError when singular or trivial.
std::array<double, 2> quadratic_roots_cylinder(const PlaneCurve& curve, double x, Axis i);

// dq/dx = numerator / denominator as printed in the first-order equations.
struct FirstOrderTerms {
  double numerator = 0.0, denominator = 0.0;
  bool singular = false;  // denominator vanishes
  bool trivial = false;   // numerator vanishes too
};
FirstOrderTerms first_order_cylinder(const PlaneCurve& curve, double x, Axis i);
// SingularityError on a vanishing denominator (including 0/0).
double rhs_first_order_cylinder(const PlaneCurve& curve, double x, Axis i);

// The listed closed forms; `name` is one of plane, circle, parabola, hyperbola, sine.
struct ClosedFormCase {
  std::string name;
  std::string curve;  // u(x)
  std::string q_x, q_y;
  double lo = 0.0, hi = 0.0;  // stated domain (infinite bounds allowed)
};
const std::vector<ClosedFormCase>& closed_form_cases();
const ClosedFormCase& closed_form_case(std::string_view name);
double closed_form_q(std::string_view name, Axis i, double x);
// (q, dq/dx) from an exact derivative of the closed form.
std::pair<double, double> closed_form_q_jet(std::string_view name, Axis i, double x);

enum class QEquation { quadratic_x, quadratic_y, first_order_x, first_order_y, torus_xy, torus_z,
                       torus_pde_first, torus_pde_third };
std::string_view equation_id(QEquation eq);

struct ODEResidualReport {
  std::string case_name;
  std::string equation;  // see equation_id()
  std::vector<double> grid;
  std::vector<double> grid2;      // second coordinate (phi) for two-dimensional samples
  std::vector<double> residuals;  // NaN where the equation is singular
  std::vector<double> lhs;        // candidate side (q' for first-order equations), when meaningful
  std::vector<double> rhs;        // printed right-hand side, when meaningful
  std::size_t singular_points = 0;
  double max_abs_residual = 0.0;  // over non-singular points
};

// Substitutes the named closed form into the quadratic and first-order equations
// of component i; returns {quadratic report, first-order report}.
std::pair<ODEResidualReport, ODEResidualReport> verify_closed_forms(std::string_view name, Axis i,
                                                                    const std::vector<double>& grid);

// Torus equations: coefficient * dq/dtheta + inhomogeneous = 0.
struct TorusOdeTerms {
  double coefficient = 0.0;
  double inhomogeneous = 0.0;
};
TorusOdeTerms torus_ode_terms(double a, double b, double theta, Axis i);
// dq_i/dtheta; SingularityError at sin(theta) = 0, and at cos(theta) = 0 for i = x, y.
double rhs_torus(double a, double b, double theta, Axis i);
// Declared singular set of the torus equation for component i.
bool torus_singular(double theta, Axis i, double margin);

enum class QCoordinate { x, theta };

struct QFactorProfile {
  QCoordinate coordinate = QCoordinate::theta;
  Axis component = Axis::x;
  std::vector<double> grid;
  std::vector<double> values;
  double anchor = 0.0;  // q(anchor) = 0; the anchor is one of the grid points
  double tolerance = 0.0;
};

struct QFactorRequest {
  SurfaceSpec surface;  // torus or plane-curve cylinder
  Axis component = Axis::x;
  std::optional<std::array<double, 2>> domain;  // default: [0.15, 1.40] on the torus, the curve domain otherwise
  std::optional<double> anchor;                 // default: pi/4 on the torus, domain midpoint otherwise
  int samples = 201;
  std::vector<double> points;  // explicit increasing sample points inside the domain; replaces the uniform grid
  double tolerance = 1e-10;
  double margin = 0.05;
};

// Adaptive Runge-Kutta from the anchor in both directions, sampled by dense output.
// SingularityError (with location) if the domain comes within `margin` of a
// singular point or the integrator step size collapses.
QFactorProfile solve_q(const QFactorRequest& request);

// q -> q + shift
QFactorProfile shifted(const QFactorProfile& profile, double shift);

void write_profile_csv(const QFactorProfile& profile, std::ostream& out);

// Residual of the printed second-order PDE for q_x(theta, phi) belonging to the
// first or third torus RHS choice, evaluated with exact derivatives of the candidate.
enum class TorusPdeChoice { first, third };
struct TorusPdeTerms {
  double derivative_part = 0.0;  // terms containing derivatives of q
  double inhomogeneous = 0.0;    // the q-free term
  double residual = 0.0;         // their sum
};
TorusPdeTerms torus_pde_terms(double a, double b, const Expression& candidate, double theta, double phi,
                              TorusPdeChoice choice);
ODEResidualReport residual_torus_secondorder(double a, double b, const Expression& candidate, TorusPdeChoice choice,
                                             const std::vector<double>& thetas, const std::vector<double>& phis);

}  // namespace gcfl
