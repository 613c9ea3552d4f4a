#include "gcfl/ode.hpp"

#include "gcfl/spec_file.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace gcfl {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

std::optional<double> eval(const std::function<double(double, double)>& f, double t, double y) {
  try {
    const double v = f(t, y);
    if (std::isfinite(v)) return v;
  } catch (const SingularityError&) {
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

}  // namespace

double OdeSolution::operator()(double t) const {
  const double lo = std::min(t_begin_, t_end_), hi = std::max(t_begin_, t_end_);
  const double slack = 1e-12 * (1.0 + std::abs(hi - lo));
  if (t < lo - slack || t > hi + slack) throw DomainError("dense output requested outside the solved interval");
  if (steps_.empty()) return y_begin_;
  const bool forward = t_end_ >= t_begin_;
  // Steps are ordered in the direction of integration.
  auto it = std::partition_point(steps_.begin(), steps_.end(), [&](const DenseStep& s) {
    const double end = s.t0 + s.h;
    return forward ? end < t : end > t;
  });
  if (it == steps_.end()) --it;
  return (*it)(t);
}

OdeSolution integrate_dopri5(const std::function<double(double, double)>& f, double t0, double y0, double t1,
                             const OdeOptions& opt) {
  OdeSolution sol;
  sol.t_begin_ = t0;
  sol.t_end_ = t1;
  sol.y_begin_ = y0;
  sol.y_end_ = y0;
  if (t0 == t1) return sol;

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double h = opt.initial_step > 0.0 ? opt.initial_step : std::min(span, 1e-3 * std::max(1.0, span));
  double t = t0, y = y0;

  auto k1o = eval(f, t, y);
  if (!k1o) throw SingularityError("right-hand side is singular at the initial point t = " + format_number(t), t);
  double k1 = *k1o;

  for (int step = 0; step < opt.max_steps; ++step) {
    if (dir * (t - t1) >= 0.0) return sol;
    const bool last = h >= std::abs(t1 - t);
    if (last) h = std::abs(t1 - t);
    const double hs = dir * h;

    if (h < 1e-13 * std::max(1.0, std::abs(t)))
      throw SingularityError("step size collapsed near t = " + format_number(t), t);

    double k2 = 0, k3 = 0, k4 = 0, k5 = 0, k6 = 0, k7 = 0, y1 = 0;
    bool ok = true;
    auto stage = [&](double tt, double yy, double& k) {
      if (!ok) return;
      const auto v = eval(f, tt, yy);
      if (v) k = *v; else ok = false;
    };
    stage(t + c2 * hs, y + hs * a21 * k1, k2);
    stage(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2), k3);
    stage(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3), k4);
    stage(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
    stage(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
    if (ok) {
      y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      stage(t + hs, y1, k7);
    }
    if (!ok || !std::isfinite(y1)) {
      ++sol.rejected_;
      h *= 0.25;
      continue;
    }

    const double err_abs = std::abs(hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    const double scale = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(y1));
    const double err = err_abs / scale;
    const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
    if (err > 1.0) {
      ++sol.rejected_;
      h *= std::min(1.0, factor);
      continue;
    }

    DenseStep d;
    d.t0 = t;
    d.h = hs;
    const double dy = y1 - y;
    const double bspl = hs * k1 - dy;
    d.r = {y, dy, bspl, dy - hs * k7 - bspl, hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)};
    sol.steps_.push_back(d);

    t = last ? t1 : t + hs;
    y = y1;
    k1 = k7;
    sol.y_end_ = y;
    h *= factor;
  }
  throw ConvergenceError("ODE integration exceeded the step budget");
}

}  // namespace gcfl
