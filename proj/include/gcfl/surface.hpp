#pragma once

// Surfaces f(x) = 0 in E^3 and their extrinsic geometry.
//
// Orientation: the unit normal is n = grad f / |grad f|. Mean curvature is
// the true average of the principal curvatures of the shape operator dn/dx
// taken with that normal, so the unit sphere f = |x|^2 - 1 has M = +1.

#include "gcfl/expression.hpp"
#include "gcfl/spec_file.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace gcfl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class SurfaceKind { implicit, plane_curve_cylinder, torus, quadric };

std::string_view to_string(SurfaceKind kind);

struct TorusParams {
  double a = 0.0;  // distance from axis to tube centre
  double b = 0.0;  // tube radius
};

struct QuadricParams {
  double a = 1.0, b = 1.0, c = 1.0;
  int alpha = 1, beta = 1, gamma = 1, delta = 1;

  int sign_product() const { return alpha * beta * gamma * delta; }
};

// Cross-section y = u(x) on a closed interval.
class PlaneCurve {
 public:
  PlaneCurve() = default;
  PlaneCurve(Expression u, double lo, double hi);

  static PlaneCurve parse(std::string_view u, double lo, double hi);

  const Expression& profile() const { return u_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool contains(double x) const { return x >= lo_ && x <= hi_; }

  // u and its first four derivatives at x.
  std::array<double, 5> derivatives(double x) const;

 private:
  Expression u_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::implicit;
  // f(x,y,z) for implicit surfaces, u(x) for cylinders; empty for parametric families.
  std::string expression_text;
  std::optional<TorusParams> torus;
  std::optional<QuadricParams> quadric;
  std::optional<std::array<double, 2>> domain;
  std::string case_name;  // optional label (e.g. "parabola") for cylinder cross-sections
  double hbar = 1.0;
  double mu = 1.0;
  double tolerance = 1e-10;  // membership: |f| < tolerance * (1 + |x|^2)

  // Derived, not serialized.
  Expression implicit;                 // f(x,y,z), built for every kind
  std::optional<PlaneCurve> curve;     // cylinders only

  bool operator==(const SurfaceSpec& other) const;
};

SurfaceSpec make_implicit(std::string_view f);
SurfaceSpec make_cylinder(std::string_view u, double lo, double hi);
SurfaceSpec make_torus(double a, double b);
SurfaceSpec make_quadric(const QuadricParams& params);

// Parses the [surface] section of a spec document.
SurfaceSpec parse_surface(std::string_view text);
SurfaceSpec surface_from_document(const SpecDocument& doc);
void write_surface(const SurfaceSpec& spec, SpecDocument& doc);
std::string to_text(const SurfaceSpec& spec);

struct ImplicitDerivatives {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};

ImplicitDerivatives implicit_derivatives(const SurfaceSpec& spec, const Vec3& x);
double implicit_value(const SurfaceSpec& spec, const Vec3& x);
bool on_surface(const SurfaceSpec& spec, const Vec3& x);
void require_on_surface(const SurfaceSpec& spec, const Vec3& x);

// Newton projection along the gradient; throws ConvergenceError on failure.
Vec3 project_to_surface(const SurfaceSpec& spec, const Vec3& start, int max_iterations = 100);

Vec3 unit_normal(const SurfaceSpec& spec, const Vec3& x);

struct CurvatureBundle {
  Vec3 n = Vec3::Zero();
  double M = 0.0;  // mean curvature, (k1 + k2) / 2
  double K = 0.0;  // Gaussian curvature
  double Vg = 0.0; // -hbar^2 (M^2 - K) / (2 mu)
};

// Exact curvatures from the gradient and Hessian of f.
CurvatureBundle curvatures(const SurfaceSpec& spec, const Vec3& x);
// Torus chart overload: (theta, phi) as in x = ((a + b sin t) cos p, (a + b sin t) sin p, b cos t).
CurvatureBundle curvatures_on_torus(const SurfaceSpec& spec, double theta, double phi);

// Finite-difference shape operator built from the normal field along two
// orthonormal tangents; returns (M, K).
std::pair<double, double> curvature_fd_oracle(const SurfaceSpec& spec, const Vec3& x,
                                              double h = 1e-4);

// Signed curvature u'' / (1 + u'^2)^(3/2) of the cross-section.
double curvature_plane_curve(const PlaneCurve& curve, double x);

// Closed forms for the parametric families.
Vec3 torus_point(double a, double b, double theta, double phi);
std::pair<double, double> torus_angles(double a, double b, const Vec3& x);
double torus_gaussian_curvature(double a, double b, double theta);
double quadric_gaussian_curvature(const QuadricParams& q, const Vec3& x);

}  // namespace gcfl
