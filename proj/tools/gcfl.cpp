// gcfl: curvature tables, force cross-checks, dummy-factor profiles, identity
// verification and constrained trajectories from a spec file.
//
// Exit codes: 0 all gates pass, 1 a gate failed, 2 input error, 3 domain or
// singularity error.

#include "gcfl/workflows.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum Exit { ok = 0, gate_failed = 1, input_error = 2, domain_error = 3 };

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gcfl::ValidationError("cannot read spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized centripetal force law toolkit"};
  std::string spec_path, out_dir, command;
  std::uint64_t seed = 1;
  int grid = 64;
  double tol = 1e-10;
  app.add_option("--spec", spec_path, "surface spec file")->required();
  app.add_option("--out", out_dir, "output directory (default: $GCFL_OUT_DIR or ./gcfl-out)");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--grid", grid, "sample count / base grid resolution")->capture_default_str()->check(CLI::Range(2, 1 << 16));
  app.add_option("--tol", tol, "ODE tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--command", command, "curvature | force | solve-q | verify | simulate")
      ->required()
      ->check(CLI::IsMember({"curvature", "force", "solve-q", "verify", "simulate"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input_error;
  }
  if (out_dir.empty()) {
    const char* env = std::getenv("GCFL_OUT_DIR");
    out_dir = env && *env ? env : "gcfl-out";
  }

  try {
    gcfl::RunConfig config = gcfl::make_config(read_file(spec_path), gcfl::parse_command(command));
    config.seed = seed;
    config.grid = grid;
    config.tol = tol;
    gcfl::RunResult result = gcfl::run_command(config);
    result.report["timestamp"] = utc_timestamp();

    const std::filesystem::path dir(out_dir);
    for (const auto& f : result.files) gcfl::write_file_atomic(dir / f.name, f.content);
    const auto report_path = dir / (command + ".json");
    gcfl::write_file_atomic(report_path, gcfl::dump_report(result.report));

    for (const auto& g : result.gates)
      std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << "  " << gcfl::format_number(g.value)
                << (g.inclusive ? " <= " : " < ") << gcfl::format_number(g.threshold) << '\n';
    std::cout << "report: " << report_path.string() << '\n';
    return result.passed() ? ok : gate_failed;
  } catch (const gcfl::ParseError& e) {
    std::cerr << spec_path << ": " << e.what() << '\n';
    return input_error;
  } catch (const gcfl::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const gcfl::SingularityError& e) {
    std::cerr << "singular: " << e.what() << " (at " << gcfl::format_number(e.location()) << ")\n";
    return domain_error;
  } catch (const gcfl::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return domain_error;
  } catch (const gcfl::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return domain_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  }
}
