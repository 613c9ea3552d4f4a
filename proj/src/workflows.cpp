#include "gcfl/workflows.hpp"

#include "gcfl/classical.hpp"
#include "gcfl/operator_lab.hpp"
#include "gcfl/plot.hpp"
#include "gcfl/q_factor.hpp"
#include "gcfl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace gcfl {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_dev(double a, double b, double floor) {
  const double s = std::max({std::abs(a), std::abs(b), floor});
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double vec_rel_dev(const Vec3& a, const Vec3& b) {
  const double s = std::max(a.norm(), b.norm());
  return s > 0.0 ? (a - b).norm() / s : 0.0;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1));
  return v;
}

int run_int(const RunConfig& c, const std::string& key, int fallback) {
  const double v = c.document.number_or("run", key, fallback);
  if (v != std::nearbyint(v)) throw ValidationError("[run] " + key + " must be an integer");
  return static_cast<int>(v);
}

std::optional<std::array<double, 2>> run_domain(const RunConfig& c) {
  if (!c.document.has("run", "domain")) return std::nullopt;
  const auto d = c.document.list("run", "domain");
  if (d.size() != 2) throw ValidationError("[run] domain must have two entries");
  return std::array<double, 2>{d[0], d[1]};
}

Vec3 vec3(const SpecDocument& doc, const std::string& section, const std::string& key) {
  const auto v = doc.list(section, key);
  if (v.size() != 3) throw ValidationError("[" + section + "] " + key + " must have three entries");
  return {v[0], v[1], v[2]};
}

Json base_report(const RunConfig& c) {
  return {{"tool", "gcfl"},
          {"command", std::string(to_string(c.command))},
          {"seed", c.seed},
          {"grid", c.grid},
          {"tol", c.tol},
          {"surface", to_text(c.surface)}};
}

void finish(RunResult& r) {
  Json gates = Json::array();
  for (const auto& g : r.gates) gates.push_back(to_json(g));
  r.report["gates"] = gates;
  r.report["passed"] = r.passed();
}

// Matches a cylinder spec to one of the listed closed-form cases.
std::optional<std::string> closed_form_name(const SurfaceSpec& s) {
  if (s.kind != SurfaceKind::plane_curve_cylinder) return std::nullopt;
  if (!s.case_name.empty()) {
    closed_form_case(s.case_name);
    return s.case_name;
  }
  for (const auto& c : closed_form_cases())
    if (c.curve == s.expression_text) return c.name;
  return std::nullopt;
}

bool is_straight(const PlaneCurve& curve, int n) {
  for (double x : linspace(curve.lo(), curve.hi(), n))
    if (curve.derivatives(x)[2] != 0.0) return false;
  return true;
}

std::string csv_number(double v) { return std::isfinite(v) ? format_number(v) : "nan"; }

// ---- curvature ----

struct CurvatureSweep {
  Json summary;
  std::string csv;
  Gate gate;
};

CurvatureSweep curvature_sweep(const RunConfig& c) {
  const SurfaceSpec& s = c.surface;
  const int n = std::max(c.grid, 2);
  std::vector<std::pair<double, Vec3>> pts;
  std::string param = "index";
  if (s.kind == SurfaceKind::torus) {
    param = "theta";
    const double phi = c.document.number_or("run", "phi", 0.0);
    for (int k = 0; k < n; ++k) {
      const double t = 2 * kPi * k / n;
      pts.emplace_back(t, torus_point(s.torus->a, s.torus->b, t, phi));
    }
  } else if (s.kind == SurfaceKind::plane_curve_cylinder) {
    param = "x";
    for (double x : linspace(s.curve->lo(), s.curve->hi(), n)) pts.emplace_back(x, Vec3(x, s.curve->profile()(x), 0));
  } else {
    SurfaceSampler sampler(s, c.seed);
    for (int k = 0; k < n; ++k) pts.emplace_back(k, sampler.point());
  }

  std::ostringstream csv;
  csv << param << ",x,y,z,nx,ny,nz,M,K,Vg,M_oracle,K_oracle\n";
  double dev_m = 0.0, dev_k = 0.0, max_abs = 0.0;
  for (const auto& [t, x] : pts) {
    const auto cb = curvatures(s, x);
    const auto [mo, ko] = curvature_fd_oracle(s, x, 1e-4);
    dev_m = std::max(dev_m, rel_dev(std::abs(cb.M), std::abs(mo), 1e-3));
    dev_k = std::max(dev_k, rel_dev(cb.K, ko, 1e-3));
    max_abs = std::max({max_abs, std::abs(cb.M), std::abs(cb.K)});
    csv << csv_number(t);
    for (int i = 0; i < 3; ++i) csv << ',' << csv_number(x(i));
    for (int i = 0; i < 3; ++i) csv << ',' << csv_number(cb.n(i));
    csv << ',' << csv_number(cb.M) << ',' << csv_number(cb.K) << ',' << csv_number(cb.Vg) << ',' << csv_number(mo)
        << ',' << csv_number(ko) << '\n';
  }
  CurvatureSweep out;
  out.csv = csv.str();
  out.summary = {{"samples", pts.size()},
                 {"parameter", param},
                 {"max_relative_deviation_M", dev_m},
                 {"max_relative_deviation_K", dev_k},
                 {"max_abs_curvature", max_abs}};
  if (s.kind == SurfaceKind::torus) {
    const double a = s.torus->a, b = s.torus->b;
    const auto [mo, ko] = curvature_fd_oracle(s, torus_point(a, b, kPi / 2, 0.0), 1e-4);
    out.summary["K_at_half_pi"] = {{"formula", torus_gaussian_curvature(a, b, kPi / 2)}, {"oracle", ko}, {"oracle_M", mo}};
  }
  out.gate = make_gate("curvature-oracle", std::max(dev_m, dev_k), 1e-5,
                       "relative deviation of |M| and K from the finite-difference shape operator");
  return out;
}

// ---- force ----

struct ForceSweep {
  Json summary;
  std::vector<Gate> gates;
};

ForceSweep force_sweep(const RunConfig& c) {
  const SurfaceSpec& s = c.surface;
  const int samples = run_int(c, "samples", 100);
  if (samples < 1) throw ValidationError("[run] samples must be positive");
  SurfaceSampler sampler(s, c.seed);
  std::map<std::string, double> pairs;
  double max_force = 0.0, max_cal = 0.0;
  int used = 0, skipped = 0, calibrated = 0;
  Json table = Json::array();

  for (int k = 0; k < samples; ++k) {
    ClassicalState st;
    st.mu = s.mu;
    if (s.kind == SurfaceKind::torus) st.x = sampler.torus_point_in_band(0.1, 0.9);
    else st.x = sampler.point();
    const double speed = sampler.uniform(0.5, 2.0);
    if (s.kind == SurfaceKind::plane_curve_cylinder) {
      const double up = s.curve->derivatives(st.x(0))[1];
      st.p = speed * Vec3(1.0, up, 0.0).normalized() * (sampler.uniform(0, 1) < 0.5 ? -1.0 : 1.0);
    } else {
      const Vec3 v = sampler.unit_ball();
      st.p = project_tangent(s, st.x, v);
      if (st.p.norm() < 1e-6) {
        ++skipped;
        continue;
      }
      st.p *= speed / st.p.norm();
    }

    ForceSample generic;
    try {
      generic = gcfl_generic(s, st);
    } catch (const SingularityError&) {
      ++skipped;
      continue;
    }
    std::vector<std::pair<std::string, Vec3>> forms = {{"generic", generic.force}};
    auto attempt = [&](const std::string& name, auto&& f) {
      try {
        forms.emplace_back(name, f());
      } catch (const SingularityError&) {
      }
    };
    if (s.kind == SurfaceKind::torus)
      for (auto [name, form] : {std::pair{"torus-form1", TorusForm::form1}, std::pair{"torus-form2", TorusForm::form2},
                                std::pair{"torus-form3", TorusForm::form3}})
        attempt(name, [&, form = form] { return gcfl_torus_form(form, s.torus->a, s.torus->b, st).force; });
    if (s.kind == SurfaceKind::plane_curve_cylinder)
      attempt("cylinder", [&] { return gcfl_cylinder(*s.curve, st).force; });
    if (s.kind == SurfaceKind::quadric && s.quadric->sign_product() != 0)
      attempt("quadric", [&] { return gcfl_quadric(*s.quadric, st).force; });
    try {
      const auto g = gcfl_general_components(s, st);
      forms.emplace_back("general", g.calibrated.force);
      const double mag = -generic.normal_component;
      if (std::abs(mag) > 1e-12) {
        const double ratio = g.raw_sum / mag;
        const double expected = s.mu * g.gradient_norm;
        max_cal = std::max(max_cal, rel_dev(ratio, expected, 0.0));
        if (calibrated < 50)
          table.push_back({{"x", {st.x(0), st.x(1), st.x(2)}}, {"ratio", ratio}, {"mu_grad_norm", expected}});
        ++calibrated;
      }
    } catch (const SingularityError&) {
    }

    ++used;
    for (const auto& f : forms) max_force = std::max(max_force, f.second.norm());
    for (std::size_t a = 0; a < forms.size(); ++a)
      for (std::size_t b = a + 1; b < forms.size(); ++b) {
        double& d = pairs[forms[a].first + "~" + forms[b].first];
        d = std::max(d, vec_rel_dev(forms[a].second, forms[b].second));
      }
  }
  if (used == 0) throw SingularityError("all force forms are singular on the sampled window", 0.0);

  ForceSweep out;
  Json pj = Json::object();
  double worst = 0.0;
  for (const auto& [k, v] : pairs) {
    pj[k] = v;
    worst = std::max(worst, v);
  }
  out.summary = {{"samples", used},
                 {"skipped", skipped},
                 {"max_force_norm", max_force},
                 {"pairwise_max_relative_deviation", pj},
                 {"calibration", {{"samples", calibrated}, {"max_relative_deviation", max_cal}, {"table", table}}}};
  if (!pairs.empty())
    out.gates.push_back(make_gate("force-form-equivalence", worst, 1e-8, "max pairwise relative deviation"));
  if (calibrated > 0)
    out.gates.push_back(make_gate("general-form-calibration", max_cal, 1e-8,
                                  "raw bracket sum over the generic force magnitude equals mu |grad f|"));
  return out;
}

// ---- dummy factors ----

struct ProfileSet {
  std::vector<QFactorProfile> profiles;
  Json summary;
  std::vector<Artifact> files;
  std::vector<Gate> gates;
};

std::vector<Axis> requested_components(const RunConfig& c) {
  std::string comp = c.document.has("run", "component") ? c.document.string("run", "component") : "all";
  if (comp == "all")
    return c.surface.kind == SurfaceKind::torus ? std::vector<Axis>{Axis::x, Axis::y, Axis::z}
                                                : std::vector<Axis>{Axis::x, Axis::y};
  return {parse_axis(comp)};
}

QFactorRequest base_request(const RunConfig& c, Axis comp) {
  QFactorRequest r;
  r.surface = c.surface;
  r.component = comp;
  r.domain = run_domain(c);
  if (c.document.has("run", "anchor")) r.anchor = c.document.number("run", "anchor");
  r.samples = run_int(c, "samples", 201);
  r.tolerance = c.tol;
  return r;
}

ProfileSet solve_profiles(const RunConfig& c) {
  ProfileSet out;
  const auto comps = requested_components(c);
  double self_conv = 0.0;
  Json pj = Json::array();
  for (Axis comp : comps) {
    QFactorRequest req = base_request(c, comp);
    QFactorProfile p = solve_q(req);
    req.tolerance = std::max(c.tol * 1e-2, 1e-14);
    const QFactorProfile fine = solve_q(req);
    double d = 0.0;
    for (std::size_t k = 0; k < p.values.size(); ++k) d = std::max(d, std::abs(p.values[k] - fine.values[k]));
    self_conv = std::max(self_conv, d);
    std::ostringstream csv;
    write_profile_csv(p, csv);
    out.files.push_back({"q_" + std::string(to_string(comp)) + ".csv", csv.str()});
    Json j = to_json(p);
    j["self_convergence"] = d;
    pj.push_back(j);
    out.profiles.push_back(std::move(p));
  }
  out.summary["profiles"] = pj;
  out.summary["self_convergence"] = self_conv;
  out.gates.push_back(make_gate("q-self-convergence", self_conv, 1e-8,
                                "max |q(tol) - q(tol/100)| over the sample grid"));

  const QFactorProfile* px = nullptr;
  const QFactorProfile* py = nullptr;
  for (const auto& p : out.profiles) {
    if (p.component == Axis::x) px = &p;
    if (p.component == Axis::y) py = &p;
  }
  if (c.surface.kind == SurfaceKind::torus && px && py) {
    const bool same = px->grid == py->grid && px->values == py->values;
    out.summary["q_x_equals_q_y_bitwise"] = same;
    out.gates.push_back(make_gate("torus-qx-equals-qy", same ? 0.0 : 1.0, 0.0, "bitwise equality", true));
  }

  std::ostringstream svg;
  PlotOptions opt;
  if (c.surface.kind == SurfaceKind::torus)
    opt.title = "dummy factors, torus a=" + format_number(c.surface.torus->a) + " b=" +
                format_number(c.surface.torus->b);
  else
    opt.title = "dummy factors, y = " + c.surface.expression_text;
  // x and y coincide on the torus; plotting both draws one solid curve.
  std::vector<QFactorProfile> plotted;
  for (const auto& p : out.profiles)
    if (!(c.surface.kind == SurfaceKind::torus && p.component == Axis::y && px)) plotted.push_back(p);
  write_profiles_svg(plotted, svg, opt);
  out.files.push_back({"q_profiles.svg", svg.str()});
  return out;
}

// ---- operator identities ----

double gauge_shift_change(const CommutatorReport& a, const CommutatorReport& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.residuals.size(); ++k)
    d = std::max(d, std::abs(a.residuals[k].residual_sup - b.residuals[k].residual_sup));
  return a.normalization > 0.0 ? d / a.normalization : d;
}

RVec shifted_field(const RVec& q, double c) { return (q.array() + c).matrix(); }

void hermiticity_gates(const ChartPtr& chart, const Basis& basis, const std::vector<Axis>& comps, Json& j,
                       std::vector<Gate>& gates) {
  Json h = Json::object();
  double worst = 0.0;
  for (Axis i : comps) {
    const double d = hermiticity_defect(geometric_momentum_op(chart, i), basis);
    h["p_" + std::string(to_string(i))] = d;
    worst = std::max(worst, d);
  }
  const double dh = hermiticity_defect(hamiltonian_op(chart), basis);
  h["H"] = dh;
  worst = std::max(worst, dh);
  h["chart"] = chart->describe();
  h["basis"] = basis.description;
  j["hermiticity"] = h;
  gates.push_back(make_gate("operator-hermiticity", worst, 1e-10, chart->describe()));
}

void verify_cylinder(const RunConfig& c, RunResult& r) {
  const SurfaceSpec& s = c.surface;
  const PlaneCurve& curve = *s.curve;
  Json j = Json::object();
  const auto name = closed_form_name(s);

  // Closed forms substituted into both equation families.
  if (name) {
    const auto& cf = closed_form_case(*name);
    const double lo = std::max(curve.lo(), cf.lo), hi = std::min(curve.hi(), cf.hi);
    Json cj = Json::array();
    double worst = 0.0;
    for (Axis i : {Axis::x, Axis::y}) {
      const auto [quad, first] = verify_closed_forms(*name, i, linspace(lo, hi, std::max(c.grid, 2)));
      cj.push_back(to_json(quad));
      cj.push_back(to_json(first));
      worst = std::max({worst, quad.max_abs_residual, first.max_abs_residual});
    }
    j["closed_forms"] = {{"case", *name}, {"reports", cj}};
    if (*name == "plane")
      r.gates.push_back(make_gate("plane-closed-form-residuals", worst, 0.0, "exactly zero", true));
    if (*name == "parabola") {
      const auto [q, dq] = closed_form_q_jet("parabola", Axis::x, 1.0);
      j["closed_forms"]["parabola_x_at_1"] = {
          {"closed_form_derivative", dq}, {"first_order_rhs", rhs_first_order_cylinder(curve, 1.0, Axis::x)}};
    }
  }

  const int n = std::max(c.grid, 256);
  if (name && *name == "circle") {
    const auto chart = circle_chart(1.0, n, s.hbar, s.mu);
    const auto basis = fourier_basis(chart, 8);
    const RVec zero = RVec::Zero(chart->size());
    Json ids = Json::array();
    double worst = 0.0, gauge = 0.0;
    for (Axis i : {Axis::x, Axis::y}) {
      const auto sw = verify_cylinder_identity(chart, i, zero, CylinderVariant::sandwich, basis);
      const auto tp = verify_cylinder_identity(chart, i, zero, CylinderVariant::three_part, basis);
      worst = std::max(worst, sw.max_relative);
      for (auto v : {CylinderVariant::sandwich, CylinderVariant::three_part})
        gauge = std::max(gauge, gauge_shift_change(v == CylinderVariant::sandwich ? sw : tp,
                                                   verify_cylinder_identity(chart, i, shifted_field(zero, 1.7), v, basis)));
      ids.push_back(to_json(sw));
      ids.push_back(to_json(tp));
    }
    j["identities"] = ids;
    r.gates.push_back(make_gate("circle-identity", worst, 1e-10, "sandwich construction, q = 0, |k| <= 8"));
    r.gates.push_back(make_gate("gauge-invariance", gauge, 1e-10, "residual change under q -> q + 1.7"));
    hermiticity_gates(chart, fourier_basis(chart, 6), {Axis::x, Axis::y}, j, r.gates);
  } else if (is_straight(curve, 64)) {
    const double slope = curve.derivatives(0.5 * (curve.lo() + curve.hi()))[1];
    const double half = 0.5 * (curve.hi() - curve.lo()) * std::sqrt(1 + slope * slope);
    const auto chart = line_chart(slope, half, n, s.hbar, s.mu);
    const auto basis = fourier_basis(chart, 3, 0, {{0, -0.9 * half, 0.9 * half}});
    const RVec zero = RVec::Zero(chart->size());
    Json ids = Json::array();
    double worst = 0.0;
    for (Axis i : {Axis::x, Axis::y}) {
      const auto p = geometric_momentum_op(chart, i);
      const auto H = hamiltonian_op(chart);
      double scale = 0.0;
      for (const auto& f : basis.functions) scale = std::max(scale, sup_norm((p * H).apply(f.psi.values)));
      for (auto v : {CylinderVariant::sandwich, CylinderVariant::three_part}) {
        const auto rep = verify_cylinder_identity(chart, i, zero, v, basis);
        worst = std::max(worst, scale > 0.0 ? rep.max_residual / scale : rep.max_residual);
        ids.push_back(to_json(rep));
      }
    }
    j["identities"] = ids;
    r.gates.push_back(make_gate("plane-identity-zero", worst, 1e-12,
                                "both sides vanish; residual relative to sup |p H psi|"));
  } else {
    // Open cross-section: windowed basis on the curve domain, q solved on the chart nodes.
    const double lo = curve.lo(), hi = curve.hi(), w = 0.05 * (hi - lo);
    Json ids = Json::array();
    double gauge = 0.0;
    bool gauge_done = false;
    for (Axis i : {Axis::x, Axis::y}) {
      Json entry = {{"component", std::string(to_string(i))}};
      try {
        auto run = [&](int level) {
          const auto chart = graph_chart(s, lo, hi, n << level);
          QFactorRequest req;
          req.surface = s;
          req.component = i;
          req.tolerance = c.tol;
          const RVec q = q_on_chart(chart, 0, req);
          return verify_cylinder_identity(chart, i, q, CylinderVariant::three_part,
                                          fourier_basis(chart, 3, 0, {{0, lo + w, hi - w}}));
        };
        entry["three_part"] = to_json(with_convergence(run, 2));
        if (!gauge_done) {
          const auto chart = graph_chart(s, lo, hi, n);
          QFactorRequest req;
          req.surface = s;
          req.component = i;
          req.tolerance = c.tol;
          const RVec q = q_on_chart(chart, 0, req);
          const auto basis = fourier_basis(chart, 3, 0, {{0, lo + w, hi - w}});
          for (auto v : {CylinderVariant::sandwich, CylinderVariant::three_part})
            gauge = std::max(gauge, gauge_shift_change(verify_cylinder_identity(chart, i, q, v, basis),
                                                       verify_cylinder_identity(chart, i, shifted_field(q, 1.7), v, basis)));
          gauge_done = true;
        }
      } catch (const SingularityError& e) {
        entry["unsolved"] = e.what();
        entry["singular_location"] = e.location();
      }
      ids.push_back(entry);
    }
    j["identities"] = ids;
    if (gauge_done) r.gates.push_back(make_gate("gauge-invariance", gauge, 1e-10, "residual change under q -> q + 1.7"));
  }
  r.report["cylinder"] = j;
}

void verify_torus(const RunConfig& c, RunResult& r) {
  const double a = c.surface.torus->a, b = c.surface.torus->b;
  Json j = Json::object();

  // Singular point of the q_x equation at theta = pi/2.
  const auto t = torus_ode_terms(a, b, kPi / 2, Axis::x);
  Json sing = {{"theta", kPi / 2}, {"coefficient", t.coefficient}, {"inhomogeneous", t.inhomogeneous}};
  double located = std::numeric_limits<double>::infinity();
  try {
    QFactorRequest req;
    req.surface = c.surface;
    req.component = Axis::x;
    req.domain = std::array<double, 2>{0.3, 2.8};
    req.tolerance = c.tol;
    solve_q(req);
  } catch (const SingularityError& e) {
    located = e.location();
    sing["detected"] = e.what();
  }
  j["q_x_singularity"] = sing;
  r.gates.push_back(make_gate("torus-singularity-detected", std::abs(located - kPi / 2), 1e-12,
                              "solving q_x across theta = pi/2 must fail there", true));

  // Identity on a theta band between the singular sets.
  const std::array<double, 2> band{0.3, 1.2};
  const int nt = std::max(256, c.grid), np = 16;
  Json ids = Json::array();
  double gauge = 0.0, finest = 0.0;
  for (Axis i : {Axis::x, Axis::z}) {
    auto run = [&](int level) {
      const auto chart = torus_chart(a, b, nt << level, np, band, c.surface.hbar, c.surface.mu);
      QFactorRequest req;
      req.surface = c.surface;
      req.component = i;
      req.domain = band;
      req.tolerance = c.tol;
      const RVec q = q_on_chart(chart, 0, req);
      auto rep = verify_torus_identity(chart, i, q, fourier_basis(chart, 1, 1, {{0, band[0], band[1]}}));
      if (level == 0)
        gauge = std::max(gauge, gauge_shift_change(rep, verify_torus_identity(chart, i, shifted_field(q, 1.7),
                                                                              fourier_basis(chart, 1, 1, {{0, band[0], band[1]}}))));
      return rep;
    };
    const auto rep = with_convergence(run, 3);
    finest = std::max(finest, rep.convergence.back().max_relative);
    ids.push_back(to_json(rep));
  }
  j["identities"] = ids;
  j["identity_finest_max_relative"] = finest;
  r.gates.push_back(make_gate("gauge-invariance", gauge, 1e-10, "residual change under q -> q + 1.7"));

  // Second-order equations for q_x with the vanishing candidate.
  const Expression zero = Expression::parse("0", {"theta", "phi"});
  Json pde = Json::array();
  for (auto ch : {TorusPdeChoice::first, TorusPdeChoice::third})
    pde.push_back(to_json(residual_torus_secondorder(a, b, zero, ch, linspace(0.3, 1.2, 7), linspace(0.0, kPi, 4))));
  j["second_order_zero_candidate"] = pde;

  const auto full = torus_chart(a, b, 48, 48, std::nullopt, c.surface.hbar, c.surface.mu);
  hermiticity_gates(full, fourier_basis(full, 2, 2), {Axis::x, Axis::y, Axis::z}, j, r.gates);
  r.report["torus"] = j;
}

void verify_sphere_quadric(const RunConfig& c, RunResult& r) {
  const auto& q = *c.surface.quadric;
  const double R = q.a;
  const std::array<double, 2> th{0.2, 1.4}, ph{0.1, 1.5};
  auto chart_at = [&](int n) { return sphere_patch_chart(R, th, ph, n, n, c.surface.hbar, c.surface.mu); };
  auto basis_on = [&](const ChartPtr& ch) { return fourier_basis(ch, 1, 0, {{0, th[0], th[1]}, {1, ph[0], ph[1]}}); };
  const int n = std::max(128, c.grid);
  auto run = [&](int level) {
    const auto ch = chart_at(n << level);
    const RVec z = RVec::Zero(ch->size());
    return verify_general_symmetrized(ch, Axis::x, {z, z, z}, basis_on(ch));
  };
  Json j = Json::object();
  j["general_symmetrized_zero_q"] = to_json(with_convergence(run, 2));
  const auto ch = chart_at(n);
  const RVec z = RVec::Zero(ch->size()), k = RVec::Constant(ch->size(), 1.7);
  const auto basis = basis_on(ch);
  const double gauge = gauge_shift_change(verify_general_symmetrized(ch, Axis::x, {z, z, z}, basis),
                                          verify_general_symmetrized(ch, Axis::x, {k, k, k}, basis));
  r.gates.push_back(make_gate("gauge-invariance", gauge, 1e-10, "residual change under q -> q + 1.7"));
  r.report["sphere_patch"] = j;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::curvature: return "curvature";
    case Command::force: return "force";
    case Command::solve_q: return "solve-q";
    case Command::verify: return "verify";
    case Command::simulate: return "simulate";
  }
  return "unknown";
}

Command parse_command(std::string_view text) {
  for (Command c : {Command::curvature, Command::force, Command::solve_q, Command::verify, Command::simulate})
    if (to_string(c) == text) return c;
  throw ValidationError("unknown command '" + std::string(text) +
                        "' (expected curvature, force, solve-q, verify or simulate)");
}

RunConfig make_config(std::string_view spec_text, Command command) {
  RunConfig c;
  c.command = command;
  c.document = parse_document(spec_text);
  static const std::map<std::string, std::set<std::string>> known = {
      {"state", {"x", "p", "mu"}},
      {"run", {"samples", "dt", "steps", "order", "stride", "component", "domain", "anchor", "phi"}}};
  for (const auto& [name, section] : c.document.sections()) {
    if (name == "surface") continue;
    const auto it = known.find(name);
    for (const auto& [key, value] : section) {
      if (it == known.end())
        throw ParseError("unknown section [" + name + "]", value.line, value.column);
      if (!it->second.count(key))
        throw ParseError("unknown key '" + key + "' in [" + name + "]", value.line, value.column);
    }
  }
  c.surface = surface_from_document(c.document);
  return c;
}

bool RunResult::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.passed; });
}

RunResult run_curvature(const RunConfig& c) {
  RunResult r;
  r.report = base_report(c);
  auto sweep = curvature_sweep(c);
  r.report["curvature"] = sweep.summary;
  r.files.push_back({"curvature.csv", sweep.csv});
  r.gates.push_back(sweep.gate);
  finish(r);
  return r;
}

RunResult run_force(const RunConfig& c) {
  RunResult r;
  r.report = base_report(c);
  auto sweep = force_sweep(c);
  r.report["force"] = sweep.summary;
  r.gates = sweep.gates;
  finish(r);
  return r;
}

RunResult run_solve_q(const RunConfig& c) {
  if (c.surface.kind != SurfaceKind::torus && c.surface.kind != SurfaceKind::plane_curve_cylinder)
    throw ValidationError("solve-q needs a torus or a plane-curve cylinder");
  RunResult r;
  r.report = base_report(c);
  auto set = solve_profiles(c);
  r.report["q_factors"] = set.summary;
  r.files = std::move(set.files);
  r.gates = std::move(set.gates);
  finish(r);
  return r;
}

RunResult run_verify(const RunConfig& c) {
  RunResult r;
  r.report = base_report(c);
  auto cs = curvature_sweep(c);
  r.report["curvature"] = cs.summary;
  r.gates.push_back(cs.gate);
  auto fs = force_sweep(c);
  r.report["force"] = fs.summary;
  r.gates.insert(r.gates.end(), fs.gates.begin(), fs.gates.end());

  const SurfaceSpec& s = c.surface;
  if (s.kind == SurfaceKind::torus) {
    auto set = solve_profiles(c);
    r.report["q_factors"] = set.summary;
    r.gates.insert(r.gates.end(), set.gates.begin(), set.gates.end());
    verify_torus(c, r);
  } else if (s.kind == SurfaceKind::plane_curve_cylinder) {
    verify_cylinder(c, r);
  } else if (s.kind == SurfaceKind::quadric && s.quadric->a == s.quadric->b && s.quadric->b == s.quadric->c &&
             s.quadric->alpha == 1 && s.quadric->beta == 1 && s.quadric->gamma == 1 && s.quadric->delta == 1) {
    verify_sphere_quadric(c, r);
  } else {
    r.report["operator_identities"] = "no chart for this surface kind";
  }
  finish(r);
  return r;
}

RunResult run_simulate(const RunConfig& c) {
  const auto& doc = c.document;
  ClassicalState st;
  st.x = vec3(doc, "state", "x");
  st.p = vec3(doc, "state", "p");
  st.mu = doc.number_or("state", "mu", c.surface.mu);
  const double dt = doc.number_or("run", "dt", 1e-3);
  const int steps = run_int(c, "steps", 10000);
  const int stride = run_int(c, "stride", 1);
  if (steps < 1 || stride < 1) throw ValidationError("[run] steps and stride must be positive");
  IntegratorOptions opt;
  opt.order = run_int(c, "order", 2);
  if (opt.order != 2 && opt.order != 4) throw ValidationError("[run] order must be 2 or 4");
  validate_state(c.surface, st);

  const Trajectory traj = integrate_constrained(c.surface, st, dt, steps, opt);
  const double h0 = traj.energy.front();
  double drift = 0.0, fmax = 0.0;
  for (std::size_t k = 0; k < traj.energy.size(); ++k) {
    drift = std::max(drift, h0 > 0.0 ? std::abs(traj.energy[k] - h0) / h0 : std::abs(traj.energy[k]));
    fmax = std::max(fmax, std::abs(traj.f_residual[k]));
  }

  RunResult r;
  r.report = base_report(c);
  Json sim = {{"dt", dt}, {"steps", steps}, {"order", opt.order}, {"stride", stride},
              {"initial_energy", h0}, {"energy_drift_relative", drift}, {"max_constraint_residual", fmax}};
  r.gates.push_back(make_gate("energy-drift", drift, 1e-8, "max |H_c(t) - H_c(0)| / H_c(0)"));
  r.gates.push_back(make_gate("constraint-residual", fmax, 1e-9, "max |f(x_t)|"));
  if (traj.states.size() >= 3 && h0 > 0.0) {
    const ForceCheck fc = verify_force_along_trajectory(traj, c.surface);
    sim["force_check"] = to_json(fc);
    if (fc.samples > 0)
      r.gates.push_back(make_gate("trajectory-force", fc.max_relative, 1e-3,
                                  "central-difference dp/dt against the generic force law"));
  }
  r.report["simulation"] = sim;

  Trajectory thin;
  for (std::size_t k = 0; k < traj.times.size(); k += static_cast<std::size_t>(stride)) {
    thin.times.push_back(traj.times[k]);
    thin.states.push_back(traj.states[k]);
    thin.energy.push_back(traj.energy[k]);
    thin.f_residual.push_back(traj.f_residual[k]);
  }
  std::ostringstream csv;
  write_trajectory_csv(thin, csv);
  r.files.push_back({"trajectory.csv", csv.str()});
  finish(r);
  return r;
}

RunResult run_command(const RunConfig& c) {
  switch (c.command) {
    case Command::curvature: return run_curvature(c);
    case Command::force: return run_force(c);
    case Command::solve_q: return run_solve_q(c);
    case Command::verify: return run_verify(c);
    case Command::simulate: return run_simulate(c);
  }
  throw Error("unknown command");
}

}  // namespace gcfl
