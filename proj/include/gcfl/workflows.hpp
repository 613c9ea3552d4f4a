#pragma once

// The command workflows behind the gcfl executable. Each returns a JSON report,
// the secondary files it produced (CSV, SVG) and its pass/fail gates; nothing
// here touches the file system.
//
// Spec documents carry a [surface] section plus optional
//
//   [state]  x = [3, 0, 1]  p = [0, 1, 0]  mu = 1
//   [run]    samples, dt, steps, order, stride, component, domain, anchor, phi
//
// Unknown keys in [state] and [run] are rejected.

#include "gcfl/report.hpp"
#include "gcfl/spec_file.hpp"
#include "gcfl/surface.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gcfl {

enum class Command { curvature, force, solve_q, verify, simulate };
std::string_view to_string(Command c);
Command parse_command(std::string_view text);

struct RunConfig {
  Command command = Command::verify;
  std::uint64_t seed = 1;
  int grid = 64;        // sample count for sweeps, base resolution for charts
  double tol = 1e-10;   // ODE tolerance
  SpecDocument document;
  SurfaceSpec surface;
};

// Parses a spec document and validates its [state] and [run] keys.
RunConfig make_config(std::string_view spec_text, Command command);

struct Artifact {
  std::string name;
  std::string content;
};

struct RunResult {
  Json report;
  std::vector<Artifact> files;
  std::vector<Gate> gates;

  bool passed() const;
};

RunResult run_curvature(const RunConfig& config);
RunResult run_force(const RunConfig& config);
RunResult run_solve_q(const RunConfig& config);
RunResult run_verify(const RunConfig& config);
RunResult run_simulate(const RunConfig& config);
RunResult run_command(const RunConfig& config);

}  // namespace gcfl
