#include "gcfl/classical.hpp"

#include <cmath>
#include <ostream>

namespace gcfl {

namespace {

ForceSample along_normal(const Vec3& n, double magnitude, ForceForm form) {
  // Force is -n * magnitude for every form.
  return {-magnitude * n, -magnitude, form};
}

void require_tangent(const Vec3& gradient, const Vec3& p) {
  const double defect = std::abs(gradient.dot(p));
  if (defect > 1e-10 * gradient.norm() * p.norm() + 1e-300)
    throw DomainError("momentum is not tangent to the surface (|grad f . p| = " + format_number(defect) +
                      ")");
}

struct TorusFrame {
  double sin_t, cos_t;
  Vec3 n;
};

TorusFrame torus_frame(double a, double b, const ClassicalState& s) {
  const Vec3& x = s.x;
  const double rxy = std::hypot(x(0), x(1));
  const double f = (rxy - a) * (rxy - a) - b * b + x(2) * x(2);
  if (!(std::abs(f) < 1e-10 * (1.0 + x.squaredNorm())))
    throw DomainError("state is off the torus (|f| = " + format_number(std::abs(f)) + ")");
  const Vec3 grad(2 * (rxy - a) * x(0) / rxy, 2 * (rxy - a) * x(1) / rxy, 2 * x(2));
  require_tangent(grad, s.p);
  return {(rxy - a) / b, x(2) / b, grad.normalized()};
}

}  // namespace

std::string_view to_string(ForceForm form) {
  switch (form) {
    case ForceForm::generic: return "generic";
    case ForceForm::cylinder: return "cylinder";
    case ForceForm::torus_form1: return "torus-form1";
    case ForceForm::torus_form2: return "torus-form2";
    case ForceForm::torus_form3: return "torus-form3";
    case ForceForm::quadric: return "quadric";
    case ForceForm::general: return "general";
  }
  return "unknown";
}

void validate_state(const SurfaceSpec& spec, const ClassicalState& state) {
  require_on_surface(spec, state.x);
  if (!(state.mu > 0.0)) throw DomainError("mass must be positive");
  require_tangent(implicit_derivatives(spec, state.x).gradient, state.p);
}

Vec3 project_tangent(const SurfaceSpec& spec, const Vec3& x, const Vec3& p) {
  const Vec3 n = unit_normal(spec, x);
  return p - n * n.dot(p);
}

Mat3 normal_jacobian(const SurfaceSpec& spec, const Vec3& x) {
  const auto d = implicit_derivatives(spec, x);
  const double norm = d.gradient.norm();
  if (!(norm > 0.0)) throw SingularityError("vanishing gradient", x.norm());
  const Vec3 n = d.gradient / norm;
  // d_i n_j = (H_ij - (H n)_i n_j) / |grad f|
  return (d.hessian - (d.hessian * n) * n.transpose()) / norm;
}

ForceSample gcfl_generic(const SurfaceSpec& spec, const ClassicalState& state) {
  validate_state(spec, state);
  const Vec3 n = unit_normal(spec, state.x);
  const Mat3 J = normal_jacobian(spec, state.x);
  return along_normal(n, state.p.dot(J * state.p) / state.mu, ForceForm::generic);
}

ForceSample gcfl_cylinder(const PlaneCurve& curve, const ClassicalState& state) {
  const Vec3& x = state.x;
  const auto d = curve.derivatives(x(0));
  if (!(std::abs(x(1) - d[0]) < 1e-10 * (1.0 + x.squaredNorm())))
    throw DomainError("state is off the cylinder");
  if (std::abs(state.p(2)) > 1e-12 * state.p.norm())
    throw DomainError("cylinder form requires motion in the cross-section plane (p_z = 0)");
  const double g = std::sqrt(1.0 + d[1] * d[1]);
  const Vec3 n(-d[1] / g, 1.0 / g, 0.0);
  require_tangent(n, state.p);
  const double kappa = curvature_plane_curve(curve, x(0));
  const double Hc = (state.p(0) * state.p(0) + state.p(1) * state.p(1)) / (2.0 * state.mu);
  // Eq. form is +2 H_c n / R; along_normal stores -magnitude.
  return along_normal(n, -2.0 * Hc * kappa, ForceForm::cylinder);
}

ForceSample gcfl_torus_form(TorusForm form, double a, double b, const ClassicalState& state) {
  if (!(a > b && b > 0.0)) throw ValidationError("torus requires a > b > 0");
  const auto fr = torus_frame(a, b, state);
  if (std::abs(fr.sin_t) < 1e-10)
    throw SingularityError("torus force form is singular at sin(theta) = 0", std::atan2(fr.sin_t, fr.cos_t));
  const double mu = state.mu;
  const double s = fr.sin_t;
  const double K = s / (a * b + b * b * s);
  const double pz2 = state.p(2) * state.p(2);
  switch (form) {
    case TorusForm::form1: {
      const double Lz = angular_momentum_z(state);
      const double mag = (b * b * b * K * K * K * Lz * Lz / mu + pz2 / (mu * b)) / (s * s);
      return along_normal(fr.n, mag, ForceForm::torus_form1);
    }
    case TorusForm::form2: {
      const double mag = K * b * (a / (b * s * s * s) * pz2 / mu + state.p.squaredNorm() / mu);
      return along_normal(fr.n, mag, ForceForm::torus_form2);
    }
    case TorusForm::form3: {
      const double mag = K * b * (a / (b * s * s * s) * pz2 / mu + 2.0 * classical_hamiltonian(state));
      return along_normal(fr.n, mag, ForceForm::torus_form3);
    }
  }
  throw Error("unknown torus form");
}

ForceSample gcfl_quadric(const QuadricParams& q, const ClassicalState& state) {
  const int sp = q.sign_product();
  if (sp == 0) throw ValidationError("compact quadric form requires alpha*beta*gamma*delta != 0");
  const auto spec = make_quadric(q);
  validate_state(spec, state);
  const Vec3& x = state.x;
  const Vec3& p = state.p;
  const double K = quadric_gaussian_curvature(q, x);
  if (K == 0.0) throw SingularityError("Gaussian curvature vanishes", x.norm());
  const double ratio = K / sp;
  if (ratio < 0.0) throw DomainError("negative fourth-root argument: inconsistent quadric parameters");
  const double kinetic = q.alpha * p(0) * p(0) / (q.a * q.a) + q.beta * p(1) * p(1) / (q.b * q.b) +
                         q.gamma * p(2) * p(2) / (q.c * q.c);
  const double mag = std::sqrt(q.a * q.b * q.c) / state.mu * std::pow(ratio, 0.25) * kinetic;
  return along_normal(unit_normal(spec, x), mag, ForceForm::quadric);
}

Vec3 general_brackets(const Vec3& f1, const Mat3& f2) {
  const double scale = f1.norm();
  for (int i = 0; i < 3; ++i)
    if (!(std::abs(f1(i)) > 1e-12 * scale))
      throw SingularityError("general force formula divides by a vanishing partial f_" +
                                 std::string(1, "xyz"[i]),
                             f1(i));
  Vec3 br;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    br(i) = (f2(i, i) / f1(i) + f1(i) * f2(j, k) / (f1(j) * f1(k))) * f1(i) -
            (f2(i, k) / f1(k) + f2(i, j) / f1(j)) * f1(i);
  }
  return br;
}

GeneralComponents gcfl_general_components(const SurfaceSpec& spec, const ClassicalState& state) {
  validate_state(spec, state);
  const auto d = implicit_derivatives(spec, state.x);
  GeneralComponents out;
  out.brackets = general_brackets(d.gradient, d.hessian);
  out.terms = out.brackets.cwiseProduct(state.p.cwiseProduct(state.p));
  out.raw_sum = out.terms.sum();
  out.gradient_norm = d.gradient.norm();
  out.calibrated = along_normal(d.gradient / out.gradient_norm,
                                out.raw_sum / (state.mu * out.gradient_norm), ForceForm::general);
  return out;
}

namespace {

// One RATTLE step of size h (h may be negative inside compositions).
void rattle_step(const SurfaceSpec& spec, ClassicalState& s, double h, const IntegratorOptions& opt) {
  const double mu = s.mu;
  const Vec3 g0 = implicit_derivatives(spec, s.x).gradient;
  double lambda = 0.0;
  Vec3 p_half = s.p, x_new = s.x;
  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    p_half = s.p - 0.5 * h * lambda * g0;
    x_new = s.x + h * p_half / mu;
    const auto d = implicit_derivatives(spec, x_new);
    if (it > 0 && std::abs(d.value) <= opt.tolerance * (1.0 + x_new.squaredNorm())) {
      converged = true;
      break;
    }
    const double slope = d.gradient.dot(-0.5 * h * h / mu * g0);
    if (slope == 0.0) break;
    lambda -= d.value / slope;
  }
  if (!converged)
    throw ConvergenceError("constraint projection did not converge (step too large near high curvature?)");
  const Vec3 g1 = implicit_derivatives(spec, x_new).gradient;
  const double nu = 2.0 * g1.dot(p_half) / (h * g1.squaredNorm());
  s.x = x_new;
  s.p = p_half - 0.5 * h * nu * g1;
}

}  // namespace

Trajectory integrate_constrained(const SurfaceSpec& spec, const ClassicalState& initial, double dt,
                                 int steps, const IntegratorOptions& options) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (steps < 0) throw ValidationError("steps must be nonnegative");
  if (options.order != 2 && options.order != 4) throw ValidationError("integrator order must be 2 or 4");
  validate_state(spec, initial);

  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double w0 = 1.0 - 2.0 * w1;

  Trajectory t;
  t.times.reserve(static_cast<std::size_t>(steps) + 1);
  t.states.reserve(static_cast<std::size_t>(steps) + 1);
  ClassicalState s = initial;
  auto record = [&](double time) {
    t.times.push_back(time);
    t.states.push_back(s);
    t.energy.push_back(classical_hamiltonian(s));
    t.f_residual.push_back(implicit_value(spec, s.x));
  };
  record(0.0);
  for (int k = 1; k <= steps; ++k) {
    if (options.order == 2) {
      rattle_step(spec, s, dt, options);
    } else {
      rattle_step(spec, s, w1 * dt, options);
      rattle_step(spec, s, w0 * dt, options);
      rattle_step(spec, s, w1 * dt, options);
    }
    record(k * dt);
  }
  return t;
}

ForceCheck verify_force_along_trajectory(const Trajectory& traj, const SurfaceSpec& spec) {
  if (traj.states.size() < 3) throw ValidationError("trajectory too short (< 3 samples)");
  ForceCheck r;
  double sum = 0.0;
  std::size_t relative_count = 0;
  for (std::size_t k = 1; k + 1 < traj.states.size(); ++k) {
    const Vec3 dpdt = (traj.states[k + 1].p - traj.states[k - 1].p) / (traj.times[k + 1] - traj.times[k - 1]);
    const Vec3 force = gcfl_generic(spec, traj.states[k]).force;
    const double err = (dpdt - force).norm();
    r.max_absolute = std::max(r.max_absolute, err);
    if (force.norm() > 1e-12) {
      const double rel = err / force.norm();
      r.max_relative = std::max(r.max_relative, rel);
      sum += rel;
      ++relative_count;
    }
    ++r.samples;
  }
  r.mean_relative = relative_count ? sum / static_cast<double>(relative_count) : 0.0;
  return r;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,x,y,z,px,py,pz,Hc,f_residual\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    out << format_number(traj.times[k]);
    for (int i = 0; i < 3; ++i) out << ',' << format_number(s.x(i));
    for (int i = 0; i < 3; ++i) out << ',' << format_number(s.p(i));
    out << ',' << format_number(traj.energy[k]) << ',' << format_number(traj.f_residual[k]) << '\n';
  }
}

}  // namespace gcfl
