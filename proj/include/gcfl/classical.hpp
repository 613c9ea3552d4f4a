#pragma once

// Free motion constrained to f(x) = 0: every closed form of the centripetal
// force law, and a constraint-projecting integrator used as an oracle.

#include "gcfl/surface.hpp"

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace gcfl {

struct ClassicalState {
  Vec3 x = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  double mu = 1.0;
};

// Throws DomainError unless x lies on the surface and grad f . p vanishes.
void validate_state(const SurfaceSpec& spec, const ClassicalState& state);

inline double classical_hamiltonian(const ClassicalState& s) { return s.p.squaredNorm() / (2.0 * s.mu); }
inline double angular_momentum_z(const ClassicalState& s) { return s.x(0) * s.p(1) - s.x(1) * s.p(0); }

enum class ForceForm { generic, cylinder, torus_form1, torus_form2, torus_form3, quadric, general };
std::string_view to_string(ForceForm form);

struct ForceSample {
  Vec3 force = Vec3::Zero();  // dp/dt
  double normal_component = 0.0;
  ForceForm form = ForceForm::generic;
};

// p - n (n . p)
Vec3 project_tangent(const SurfaceSpec& spec, const Vec3& x, const Vec3& p);

// J(i, j) = d n_j / d x_i for the field n = grad f / |grad f|.
Mat3 normal_jacobian(const SurfaceSpec& spec, const Vec3& x);

// -n (p . grad n . p) / mu
ForceSample gcfl_generic(const SurfaceSpec& spec, const ClassicalState& state);

// 2 H_c n / R on the cylinder over y = u(x), motion in the cross-section plane.
ForceSample gcfl_cylinder(const PlaneCurve& curve, const ClassicalState& state);

enum class TorusForm { form1, form2, form3 };

// The three right-hand sides for the torus: L_z and p_z (form1), p^2 (form2), H_c (form3).
ForceSample gcfl_torus_form(TorusForm form, double a, double b, const ClassicalState& state);

// Compact K^(1/4) form for quadrics with alpha*beta*gamma*delta != 0.
ForceSample gcfl_quadric(const QuadricParams& params, const ClassicalState& state);

struct GeneralComponents {
  Vec3 brackets = Vec3::Zero();  // curly-bracket coefficient multiplying p_i^2
  Vec3 terms = Vec3::Zero();     // brackets(i) * p_i^2
  double raw_sum = 0.0;          // sum of terms, as printed (no 1/mu, no normalization)
  double gradient_norm = 0.0;
  ForceSample calibrated;        // -n raw_sum / (mu |grad f|)
};

// Bracket coefficients from the partials of f; SingularityError if any f_i vanishes.
Vec3 general_brackets(const Vec3& gradient, const Mat3& hessian);

GeneralComponents gcfl_general_components(const SurfaceSpec& spec, const ClassicalState& state);

struct Trajectory {
  std::vector<double> times;
  std::vector<ClassicalState> states;
  std::vector<double> energy;      // H_c
  std::vector<double> f_residual;  // f(x_t)
};

struct IntegratorOptions {
  int order = 2;              // 2: RATTLE step; 4: symmetric triple-jump composition of it
  double tolerance = 1e-12;   // |f| / (1 + |x|^2) accepted after position projection
  int max_iterations = 50;
};

Trajectory integrate_constrained(const SurfaceSpec& spec, const ClassicalState& initial, double dt,
                                 int steps, const IntegratorOptions& options = {});

struct ForceCheck {
  std::size_t samples = 0;
  double max_relative = 0.0;   // over samples with |force| above 1e-12
  double mean_relative = 0.0;
  double max_absolute = 0.0;
};

// Central-difference dp/dt at interior samples against gcfl_generic.
ForceCheck verify_force_along_trajectory(const Trajectory& trajectory, const SurfaceSpec& spec);

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace gcfl
