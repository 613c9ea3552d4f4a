// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "gcfl/workflows.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace gcfl;

namespace {

const char* kSphere = "[surface]\nkind = \"quadric\"\na = 1 b = 1 c = 1\n";
const char* kTorus = "[surface]\nkind = \"torus\"\na = 3 b = 1\n[run]\ndomain = [0.15, 1.40]\nsamples = 201\n";
const char* kBareTorus = "[surface]\nkind = \"torus\"\na = 3 b = 1\n";
const char* kEllipsoid = "[surface]\nkind = \"quadric\"\na = 1 b = 2 c = 3\n";
const char* kCircle = "[surface]\nkind = \"plane-curve-cylinder\"\nu = \"sqrt(1-x^2)\"\ndomain = [-0.9, 0.9]\ncase = \"circle\"\n";
const char* kParabola = "[surface]\nkind = \"plane-curve-cylinder\"\nu = \"x^2\"\ndomain = [0.3, 1.7]\ncase = \"parabola\"\n";
const char* kSine = "[surface]\nkind = \"plane-curve-cylinder\"\nu = \"sin(x)\"\ndomain = [-3, 3]\ncase = \"sine\"\n";
const char* kPlane = "[surface]\nkind = \"plane-curve-cylinder\"\nu = \"x\"\ndomain = [-1, 1]\ncase = \"plane\"\n";

RunResult run(const std::string& spec, Command cmd, int grid = 64) {
  RunConfig c = make_config(spec, cmd);
  c.grid = grid;
  return run_command(c);
}

const Gate* find_gate(const RunResult& r, const std::string& name) {
  for (const auto& g : r.gates)
    if (g.name == name) return &g;
  return nullptr;
}

// Worst value of a gate across runs; infinity when a run lacks it or fails it.
double gate_value(const std::vector<RunResult>& runs, const std::string& name, bool& ok) {
  double worst = 0.0;
  for (const auto& r : runs) {
    const Gate* g = find_gate(r, name);
    if (!g) {
      ok = false;
      return INFINITY;
    }
    ok = ok && g->passed;
    worst = std::max(worst, g->value);
  }
  return worst;
}

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome curvature_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<RunResult> runs;
  for (const char* s : {kSphere, kTorus, kEllipsoid, kCircle, kParabola, kSine})
    runs.push_back(run(s, Command::curvature, 100));
  const double secs = seconds_since(t0);
  bool ok = true;
  const double worst = gate_value(runs, "curvature-oracle", ok);
  for (const auto& r : runs) ok = ok && r.report["curvature"]["samples"] == 100;
  ok = ok && secs < 10.0;
  return {ok, "max rel dev " + fmt(worst) + " over 6 surfaces x 100 points, " + fmt(secs) + " s"};
}

Outcome torus_gaussian_spot() {
  const auto r = run(kTorus, Command::curvature);
  const auto& k = r.report["curvature"]["K_at_half_pi"];
  const double formula = k["formula"], oracle = k["oracle"];
  const bool ok = formula == 0.25 && std::abs(oracle - 0.25) < 1e-6;
  return {ok, "formula " + fmt(formula) + ", oracle off by " + fmt(std::abs(oracle - 0.25))};
}

Outcome force_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<RunResult> runs;
  for (const char* s : {kBareTorus, kCircle, kParabola, kSine, kSphere, kEllipsoid}) runs.push_back(run(s, Command::force));
  const double secs = seconds_since(t0);
  bool ok = secs < 10.0;
  const double worst = gate_value(runs, "force-form-equivalence", ok);
  for (const auto& r : runs) ok = ok && r.report["force"]["samples"] == 100;
  return {ok, "max pairwise rel dev " + fmt(worst) + " over 100 states each, " + fmt(secs) + " s"};
}

Outcome trajectory_oracle() {
  const std::string run_block = "[run]\ndt = 1e-3 steps = 10000\n";
  std::vector<RunResult> runs;
  runs.push_back(run(std::string(kSphere) + "[state]\nx = [1, 0, 0]\np = [0, 0.6, 0.8]\n" + run_block, Command::simulate));
  runs.push_back(run(std::string(kBareTorus) + "[state]\nx = [4, 0, 0]\np = [0, 0, 1]\n" + run_block,
                     Command::simulate));
  runs.push_back(run(std::string(kBareTorus) + "[state]\nx = [3.5, 0, 0.8660254037844386]\n"
                     "p = [0.8660254037844386, 0.9, -0.5]\n[run]\ndt = 1e-3 steps = 10000 order = 4\n",
                     Command::simulate));
  bool ok = true;
  const double f = gate_value(runs, "trajectory-force", ok);
  const double h = gate_value(runs, "energy-drift", ok);
  const double c = gate_value(runs, "constraint-residual", ok);
  return {ok, "dp/dt rel dev " + fmt(f) + ", dH/H " + fmt(h) + ", max|f| " + fmt(c)};
}

Outcome general_calibration() {
  const auto sphere = run(kSphere, Command::force);
  const auto ellipsoid = run(kEllipsoid, Command::force);
  bool ok = true;
  const double dev = gate_value({sphere}, "general-form-calibration", ok);
  const auto& cal = sphere.report["force"]["calibration"];
  ok = ok && cal["samples"].get<int>() >= 50;
  const auto& table = ellipsoid.report["force"]["calibration"]["table"];
  ok = ok && table.is_array() && !table.empty();
  return {ok, "sphere ratio vs mu|grad f| " + fmt(dev) + " at " + cal["samples"].dump() + " points, ellipsoid table " +
                  std::to_string(table.size()) + " rows"};
}

Outcome dummy_factor_harness() {
  const auto plane = run(kPlane, Command::verify);
  const auto parabola = run(kParabola, Command::verify);
  const auto torus = run(kTorus, Command::verify);
  bool ok = true;
  gate_value({plane}, "plane-closed-form-residuals", ok);
  const auto& p = parabola.report["cylinder"]["closed_forms"]["parabola_x_at_1"];
  const double dq = p["closed_form_derivative"], rhs = p["first_order_rhs"];
  ok = ok && dq == 1.0 && std::abs(rhs - 1.33099284374987) < 1e-12;
  gate_value({torus}, "torus-singularity-detected", ok);
  const double inh = torus.report["torus"]["q_x_singularity"]["inhomogeneous"];
  ok = ok && std::abs(inh - 244.0) < 1e-9;
  return {ok, "plane exact zero, parabola " + fmt(dq) + " vs " + std::to_string(rhs) + ", torus singular at pi/2 with " +
                  fmt(inh)};
}

Outcome figure_profiles() {
  const auto r = run(kTorus, Command::solve_q);
  bool ok = true;
  gate_value({r}, "torus-qx-equals-qy", ok);
  const double conv = gate_value({r}, "q-self-convergence", ok);
  bool svg = false;
  for (const auto& f : r.files)
    if (f.name == "q_profiles.svg" && f.content.find("<svg") != std::string::npos) svg = true;
  ok = ok && svg;
  return {ok, "q_x == q_y bitwise, svg " + std::string(svg ? "emitted" : "missing") + ", self-convergence " + fmt(conv)};
}

Outcome circle_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run(kCircle, Command::verify, 256);
  const double secs = seconds_since(t0);
  bool ok = secs < 5.0;
  const double v = gate_value({r}, "circle-identity", ok);
  return {ok, "max rel residual " + fmt(v) + " at 256 points, |k| <= 8, " + fmt(secs) + " s"};
}

Outcome hermiticity_gauge() {
  std::vector<RunResult> runs;
  for (const char* s : {kCircle, kTorus, kSphere}) runs.push_back(run(s, Command::verify));
  bool ok = true;
  double herm = 0.0;
  for (const auto& r : runs)
    for (const auto& g : r.gates)
      if (g.name.find("hermiticity") != std::string::npos) {
        ok = ok && g.passed;
        herm = std::max(herm, g.value);
      }
  const double gauge = gate_value(runs, "gauge-invariance", ok);
  return {ok, "hermiticity defect " + fmt(herm) + ", gauge shift change " + fmt(gauge)};
}

Outcome determinism() {
  bool ok = true;
  for (const char* s : {kTorus, kSphere, kCircle}) {
    const auto a = dump_report(run(s, Command::verify).report);
    const auto b = dump_report(run(s, Command::verify).report);
    ok = ok && a == b;
  }
  return {ok, "verify reports byte-identical on torus, sphere, circle"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"curvature oracle agreement", curvature_oracle},
      {"torus K(pi/2) = 0.25", torus_gaussian_spot},
      {"centripetal force form equivalence", force_equivalence},
      {"trajectory oracle", trajectory_oracle},
      {"symmetrized form calibration", general_calibration},
      {"dummy-factor harness", dummy_factor_harness},
      {"torus q profiles", figure_profiles},
      {"circle operator identity", circle_identity},
      {"hermiticity and gauge invariance", hermiticity_gauge},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("%s %2zu %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
