#include "gcfl/report.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace gcfl {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

Gate make_gate(std::string name, double value, double threshold, std::string detail, bool inclusive) {
  Gate g;
  g.name = std::move(name);
  g.value = value;
  g.threshold = threshold;
  g.inclusive = inclusive;
  g.passed = std::isfinite(value) && (inclusive ? value <= threshold : value < threshold);
  g.detail = std::move(detail);
  return g;
}

Json to_json(const Gate& g) {
  Json j{{"name", g.name},
         {"value", number(g.value)},
         {"threshold", g.threshold},
         {"comparison", g.inclusive ? "<=" : "<"},
         {"passed", g.passed}};
  if (!g.detail.empty()) j["detail"] = g.detail;
  return j;
}

Json to_json(const ODEResidualReport& r) {
  Json j{{"case", r.case_name},
         {"equation", r.equation},
         {"grid", numbers(r.grid)},
         {"residuals", numbers(r.residuals)},
         {"singular_points", r.singular_points},
         {"max_abs_residual", number(r.max_abs_residual)}};
  if (!r.grid2.empty()) j["grid2"] = numbers(r.grid2);
  if (!r.lhs.empty()) j["lhs"] = numbers(r.lhs);
  if (!r.rhs.empty()) j["rhs"] = numbers(r.rhs);
  return j;
}

Json to_json(const CommutatorReport& r) {
  Json res = Json::array();
  for (const auto& b : r.residuals)
    res.push_back({{"label", b.label},
                   {"lhs_sup", number(b.lhs_sup)},
                   {"rhs_sup", number(b.rhs_sup)},
                   {"residual_sup", number(b.residual_sup)},
                   {"relative", number(b.relative)}});
  Json conv = Json::array();
  for (const auto& c : r.convergence)
    conv.push_back({{"grid", c.grid}, {"max_relative", number(c.max_relative)}, {"max_residual", number(c.max_residual)}});
  return {{"identity", r.identity},
          {"component", r.component},
          {"chart", r.chart},
          {"grid", r.grid},
          {"windows", r.windows},
          {"basis", r.basis},
          {"residuals", res},
          {"normalization", number(r.normalization)},
          {"max_relative", number(r.max_relative)},
          {"max_residual", number(r.max_residual)},
          {"convergence", conv}};
}

Json to_json(const ForceCheck& c) {
  return {{"samples", c.samples},
          {"max_relative", number(c.max_relative)},
          {"mean_relative", number(c.mean_relative)},
          {"max_absolute", number(c.max_absolute)}};
}

Json to_json(const QFactorProfile& p) {
  return {{"coordinate", p.coordinate == QCoordinate::theta ? "theta" : "x"},
          {"component", std::string(to_string(p.component))},
          {"anchor", p.anchor},
          {"tolerance", p.tolerance},
          {"grid", numbers(p.grid)},
          {"values", numbers(p.values)}};
}

std::string dump_report(const Json& report) {
  return report.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(dir);
  const auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

}  // namespace gcfl
