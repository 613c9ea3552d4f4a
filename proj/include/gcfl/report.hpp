#pragma once

// JSON forms of the residual, commutator and force reports, and atomic file emission.

#include "gcfl/classical.hpp"
#include "gcfl/operator_lab.hpp"
#include "gcfl/q_factor.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace gcfl {

using Json = nlohmann::json;

// A pass/fail check: passed iff value < threshold (value <= threshold when inclusive).
struct Gate {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool inclusive = false;
  bool passed = false;
  std::string detail;
};
Gate make_gate(std::string name, double value, double threshold, std::string detail = {}, bool inclusive = false);

Json to_json(const Gate& gate);
Json to_json(const ODEResidualReport& report);
Json to_json(const CommutatorReport& report);
Json to_json(const ForceCheck& check);
Json to_json(const QFactorProfile& profile);

// Pretty-printed with sorted keys and a trailing newline; NaN and infinities become null.
std::string dump_report(const Json& report);

// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gcfl
