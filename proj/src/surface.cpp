#include "gcfl/surface.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace gcfl {

namespace {

const std::vector<std::string> kXYZ = {"x", "y", "z"};

Mat3 adjugate(const Mat3& m) {
  Mat3 adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return adj;
}

void validate_torus(const TorusParams& t) {
  if (!(t.b > 0.0)) throw ValidationError("torus requires b > 0");
  if (!(t.a > t.b)) throw ValidationError("torus requires a > b (constraint a > b violated)");
}

void validate_quadric(const QuadricParams& q) {
  if (!(q.a > 0.0 && q.b > 0.0 && q.c > 0.0))
    throw ValidationError("quadric lengths a, b, c must be positive");
  for (int s : {q.alpha, q.beta, q.gamma})
    if (s < -1 || s > 1) throw ValidationError("quadric alpha, beta, gamma must be -1, 0 or 1");
  if (q.delta != 0 && q.delta != 1) throw ValidationError("quadric delta must be 0 or 1");
}

std::string torus_expression(const TorusParams& t) {
  return "(sqrt(x^2+y^2)-" + format_number(t.a) + ")^2-" + format_number(t.b) + "^2+z^2";
}

std::string quadric_expression(const QuadricParams& q) {
  std::string out;
  const std::array<int, 3> signs = {q.alpha, q.beta, q.gamma};
  const std::array<double, 3> len = {q.a, q.b, q.c};
  for (int i = 0; i < 3; ++i) {
    if (signs[i] == 0) continue;
    out += (signs[i] > 0 ? (out.empty() ? "" : "+") : "-");
    out += kXYZ[i] + "^2/" + format_number(len[i]) + "^2";
  }
  if (out.empty()) out = "0";
  if (q.delta != 0) out += q.delta > 0 ? "-1" : "+1";
  return out;
}

std::string cylinder_expression(std::string_view u) { return "y-(" + std::string(u) + ")"; }

Vec3 normalized_gradient(const SurfaceSpec& spec, const Vec3& x) {
  const Vec3 g = implicit_derivatives(spec, x).gradient;
  const double norm = g.norm();
  if (!(norm > 0.0)) throw SingularityError("vanishing gradient", x.norm());
  return g / norm;
}

}  // namespace

std::string_view to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::implicit: return "implicit";
    case SurfaceKind::plane_curve_cylinder: return "plane-curve-cylinder";
    case SurfaceKind::torus: return "torus";
    case SurfaceKind::quadric: return "quadric";
  }
  return "unknown";
}

PlaneCurve::PlaneCurve(Expression u, double lo, double hi) : u_(std::move(u)), lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw ValidationError("curve domain must satisfy lo < hi");
}

PlaneCurve PlaneCurve::parse(std::string_view u, double lo, double hi) {
  return PlaneCurve(Expression::parse(u, {"x"}), lo, hi);
}

std::array<double, 5> PlaneCurve::derivatives(double x) const {
  if (!contains(x))
    throw DomainError("x = " + format_number(x) + " outside curve domain [" + format_number(lo_) +
                      ", " + format_number(hi_) + "]");
  using Jet = ad::Taylor<double, 4>;
  const Jet var = Jet::variable(x);
  const Jet u = u_.evaluate<Jet>(std::span<const Jet>(&var, 1));
  std::array<double, 5> d{};
  for (int k = 0; k <= 4; ++k) d[static_cast<std::size_t>(k)] = u.derivative(k);
  return d;
}

bool SurfaceSpec::operator==(const SurfaceSpec& o) const {
  auto same_torus = [&] {
    if (torus.has_value() != o.torus.has_value()) return false;
    return !torus || (torus->a == o.torus->a && torus->b == o.torus->b);
  };
  auto same_quadric = [&] {
    if (quadric.has_value() != o.quadric.has_value()) return false;
    if (!quadric) return true;
    const auto& p = *quadric;
    const auto& q = *o.quadric;
    return p.a == q.a && p.b == q.b && p.c == q.c && p.alpha == q.alpha && p.beta == q.beta &&
           p.gamma == q.gamma && p.delta == q.delta;
  };
  return kind == o.kind && expression_text == o.expression_text && same_torus() &&
         same_quadric() && domain == o.domain && case_name == o.case_name && hbar == o.hbar &&
         mu == o.mu && tolerance == o.tolerance;
}

SurfaceSpec make_implicit(std::string_view f) {
  SurfaceSpec s;
  s.kind = SurfaceKind::implicit;
  s.expression_text = std::string(f);
  s.implicit = Expression::parse(f, kXYZ);
  return s;
}

SurfaceSpec make_cylinder(std::string_view u, double lo, double hi) {
  SurfaceSpec s;
  s.kind = SurfaceKind::plane_curve_cylinder;
  s.expression_text = std::string(u);
  s.curve = PlaneCurve::parse(u, lo, hi);
  s.domain = std::array<double, 2>{lo, hi};
  s.implicit = Expression::parse(cylinder_expression(u), kXYZ);
  return s;
}

SurfaceSpec make_torus(double a, double b) {
  SurfaceSpec s;
  s.kind = SurfaceKind::torus;
  s.torus = TorusParams{a, b};
  validate_torus(*s.torus);
  s.implicit = Expression::parse(torus_expression(*s.torus), kXYZ);
  return s;
}

SurfaceSpec make_quadric(const QuadricParams& params) {
  SurfaceSpec s;
  s.kind = SurfaceKind::quadric;
  validate_quadric(params);
  s.quadric = params;
  s.implicit = Expression::parse(quadric_expression(params), kXYZ);
  return s;
}

SurfaceSpec surface_from_document(const SpecDocument& doc) {
  static const std::set<std::string> known = {"kind", "f",    "u",     "a",     "b",
                                              "c",    "alpha", "beta", "gamma", "delta",
                                              "hbar", "mu",   "domain", "tol",  "case"};
  auto sec = doc.sections().find("surface");
  if (sec == doc.sections().end()) throw ValidationError("missing [surface] section");
  for (const auto& [key, value] : sec->second)
    if (!known.count(key))
      throw ParseError("unknown key '" + key + "' in [surface]", value.line, value.column);

  const std::string kind = doc.string("surface", "kind");
  auto expression_from = [&](const std::string& key, const std::vector<std::string>& vars) {
    const SpecValue* v = doc.find("surface", key);
    if (!v) throw ValidationError("kind \"" + kind + "\" requires key '" + key + "'");
    if (!v->is_string()) throw ParseError("key '" + key + "' must be a string", v->line, v->column);
    const auto& text = std::get<std::string>(v->data);
    Expression::parse(text, vars, v->line, v->column);  // positions diagnostics in the document
    return text;
  };
  auto sign = [&](const std::string& key, double fallback) {
    const double v = doc.number_or("surface", key, fallback);
    if (v != std::nearbyint(v)) throw ValidationError("key '" + key + "' must be an integer");
    return static_cast<int>(v);
  };

  SurfaceSpec s;
  if (kind == "implicit") {
    s = make_implicit(expression_from("f", kXYZ));
  } else if (kind == "plane-curve-cylinder" || kind == "cylinder") {
    const std::string u = expression_from("u", {"x"});
    if (!doc.has("surface", "domain"))
      throw ValidationError("kind \"plane-curve-cylinder\" requires key 'domain'");
    const auto d = doc.list("surface", "domain");
    if (d.size() != 2) throw ValidationError("domain must have two entries");
    s = make_cylinder(u, d[0], d[1]);
  } else if (kind == "torus") {
    s = make_torus(doc.number("surface", "a"), doc.number("surface", "b"));
  } else if (kind == "quadric") {
    QuadricParams q;
    q.a = doc.number("surface", "a");
    q.b = doc.number("surface", "b");
    q.c = doc.number("surface", "c");
    q.alpha = sign("alpha", 1);
    q.beta = sign("beta", 1);
    q.gamma = sign("gamma", 1);
    q.delta = sign("delta", 1);
    s = make_quadric(q);
  } else {
    const SpecValue* v = doc.find("surface", "kind");
    throw ParseError("unknown surface kind \"" + kind + "\"", v->line, v->column);
  }

  if (s.kind != SurfaceKind::plane_curve_cylinder && doc.has("surface", "domain")) {
    const auto d = doc.list("surface", "domain");
    if (d.size() != 2) throw ValidationError("domain must have two entries");
    s.domain = std::array<double, 2>{d[0], d[1]};
  }
  s.hbar = doc.number_or("surface", "hbar", 1.0);
  s.mu = doc.number_or("surface", "mu", 1.0);
  s.tolerance = doc.number_or("surface", "tol", 1e-10);
  if (doc.has("surface", "case")) s.case_name = doc.string("surface", "case");
  if (!(s.hbar > 0.0)) throw ValidationError("hbar must be positive");
  if (!(s.mu > 0.0)) throw ValidationError("mu must be positive");
  if (!(s.tolerance > 0.0)) throw ValidationError("tol must be positive");
  return s;
}

SurfaceSpec parse_surface(std::string_view text) { return surface_from_document(parse_document(text)); }

void write_surface(const SurfaceSpec& spec, SpecDocument& doc) {
  auto num = [&](const std::string& k, double v) { doc.set("surface", k, SpecValue{v}); };
  auto str = [&](const std::string& k, const std::string& v) { doc.set("surface", k, SpecValue{v}); };
  str("kind", std::string(to_string(spec.kind)));
  switch (spec.kind) {
    case SurfaceKind::implicit: str("f", spec.expression_text); break;
    case SurfaceKind::plane_curve_cylinder: str("u", spec.expression_text); break;
    case SurfaceKind::torus:
      num("a", spec.torus->a);
      num("b", spec.torus->b);
      break;
    case SurfaceKind::quadric:
      num("a", spec.quadric->a);
      num("b", spec.quadric->b);
      num("c", spec.quadric->c);
      num("alpha", spec.quadric->alpha);
      num("beta", spec.quadric->beta);
      num("gamma", spec.quadric->gamma);
      num("delta", spec.quadric->delta);
      break;
  }
  if (spec.domain)
    doc.set("surface", "domain", SpecValue{std::vector<double>{(*spec.domain)[0], (*spec.domain)[1]}});
  if (!spec.case_name.empty()) str("case", spec.case_name);
  num("hbar", spec.hbar);
  num("mu", spec.mu);
  num("tol", spec.tolerance);
}

std::string to_text(const SurfaceSpec& spec) {
  SpecDocument doc;
  write_surface(spec, doc);
  return to_text(doc);
}

ImplicitDerivatives implicit_derivatives(const SurfaceSpec& spec, const Vec3& x) {
  using D = ad::Dual2<double, 3>;
  const std::array<D, 3> vars = {D::variable(x(0), 0), D::variable(x(1), 1), D::variable(x(2), 2)};
  const D f = spec.implicit.evaluate<D>(vars);
  return {f.v, f.g, f.H};
}

double implicit_value(const SurfaceSpec& spec, const Vec3& x) {
  const std::array<double, 3> v = {x(0), x(1), x(2)};
  return spec.implicit(v);
}

bool on_surface(const SurfaceSpec& spec, const Vec3& x) {
  return std::abs(implicit_value(spec, x)) < spec.tolerance * (1.0 + x.squaredNorm());
}

void require_on_surface(const SurfaceSpec& spec, const Vec3& x) {
  const double f = implicit_value(spec, x);
  if (!(std::abs(f) < spec.tolerance * (1.0 + x.squaredNorm())))
    throw DomainError("point is off the surface (|f| = " + format_number(std::abs(f)) + ")");
}

Vec3 project_to_surface(const SurfaceSpec& spec, const Vec3& start, int max_iterations) {
  Vec3 x = start;
  for (int it = 0; it < max_iterations; ++it) {
    const auto d = implicit_derivatives(spec, x);
    if (std::abs(d.value) < 0.01 * spec.tolerance * (1.0 + x.squaredNorm())) return x;
    const double g2 = d.gradient.squaredNorm();
    if (!(g2 > 0.0)) throw ConvergenceError("projection hit a vanishing gradient");
    x -= d.value / g2 * d.gradient;
  }
  if (on_surface(spec, x)) return x;
  throw ConvergenceError("projection onto surface did not converge");
}

Vec3 unit_normal(const SurfaceSpec& spec, const Vec3& x) {
  require_on_surface(spec, x);
  return normalized_gradient(spec, x);
}

CurvatureBundle curvatures(const SurfaceSpec& spec, const Vec3& x) {
  require_on_surface(spec, x);
  const auto d = implicit_derivatives(spec, x);
  const Vec3& g = d.gradient;
  const Mat3& H = d.hessian;
  const double norm = g.norm();
  if (!(norm > 0.0)) throw SingularityError("vanishing gradient", x.norm());
  if (spec.kind == SurfaceKind::quadric && spec.quadric->sign_product() == 0)
    throw ValidationError("quadric with alpha*beta*gamma*delta = 0 has no Gaussian-curvature formula");

  CurvatureBundle c;
  c.n = g / norm;
  c.M = (g.squaredNorm() * H.trace() - g.dot(H * g)) / (2.0 * norm * norm * norm);
  c.K = g.dot(adjugate(H) * g) / (g.squaredNorm() * g.squaredNorm());
  c.Vg = -spec.hbar * spec.hbar * (c.M * c.M - c.K) / (2.0 * spec.mu);
  return c;
}

CurvatureBundle curvatures_on_torus(const SurfaceSpec& spec, double theta, double phi) {
  if (!spec.torus) throw ValidationError("chart coordinates require a torus spec");
  return curvatures(spec, torus_point(spec.torus->a, spec.torus->b, theta, phi));
}

std::pair<double, double> curvature_fd_oracle(const SurfaceSpec& spec, const Vec3& x, double h) {
  if (!(h > 1e-12 * (1.0 + x.norm()))) throw DomainError("finite-difference step underflow");
  require_on_surface(spec, x);
  const Vec3 n = normalized_gradient(spec, x);

  // Any vector not parallel to n seeds the tangent frame.
  Vec3 seed = Vec3::UnitX();
  if (std::abs(n.dot(seed)) > 0.8) seed = Vec3::UnitY();
  const Vec3 e1 = (seed - n.dot(seed) * n).normalized();
  const Vec3 e2 = n.cross(e1);
  const std::array<Vec3, 2> e = {e1, e2};

  Eigen::Matrix2d S;
  for (int b = 0; b < 2; ++b) {
    const Vec3 dn = (normalized_gradient(spec, x + h * e[b]) - normalized_gradient(spec, x - h * e[b])) /
                    (2.0 * h);
    for (int a = 0; a < 2; ++a) S(a, b) = e[a].dot(dn);
  }
  const Eigen::Matrix2d sym = 0.5 * (S + S.transpose());
  return {0.5 * sym.trace(), sym.determinant()};
}

double curvature_plane_curve(const PlaneCurve& curve, double x) {
  const auto d = curve.derivatives(x);
  const double s = 1.0 + d[1] * d[1];
  return d[2] / (s * std::sqrt(s));
}

Vec3 torus_point(double a, double b, double theta, double phi) {
  const double rho = a + b * std::sin(theta);
  return {rho * std::cos(phi), rho * std::sin(phi), b * std::cos(theta)};
}

std::pair<double, double> torus_angles(double a, double b, const Vec3& x) {
  const double sin_t = (std::hypot(x(0), x(1)) - a) / b;
  const double cos_t = x(2) / b;
  double theta = std::atan2(sin_t, cos_t);
  double phi = std::atan2(x(1), x(0));
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return {theta, phi};
}

double torus_gaussian_curvature(double a, double b, double theta) {
  const double s = std::sin(theta);
  return s / (a * b + b * b * s);
}

double quadric_gaussian_curvature(const QuadricParams& q, const Vec3& x) {
  const int sp = q.sign_product();
  if (sp == 0) throw ValidationError("Gaussian curvature formula requires alpha*beta*gamma*delta != 0");
  auto sq = [](double v) { return v * v; };
  const double S = sq(q.alpha * x(0)) / sq(sq(q.a)) + sq(q.beta * x(1)) / sq(sq(q.b)) +
                   sq(q.gamma * x(2)) / sq(sq(q.c));
  return sp / sq(q.a * q.b * q.c * S);
}

}  // namespace gcfl
