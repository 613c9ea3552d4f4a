#pragma once

// Dormand-Prince 5(4) for scalar ODEs y' = f(t, y) with continuous output.

#include "gcfl/errors.hpp"

#include <array>
#include <functional>
#include <vector>

namespace gcfl {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0: chosen from the interval length
  int max_steps = 1000000;
};

// One accepted step with its fourth-order interpolant.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<double, 5> r{};

  double operator()(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
  }
};

class OdeSolution {
 public:
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  double final_value() const { return y_end_; }
  std::size_t accepted_steps() const { return steps_.size(); }
  std::size_t rejected_steps() const { return rejected_; }

  // Dense output anywhere between t_begin and t_end.
  double operator()(double t) const;

 private:
  friend OdeSolution integrate_dopri5(const std::function<double(double, double)>&, double, double, double,
                                      const OdeOptions&);
  double t_begin_ = 0.0, t_end_ = 0.0, y_begin_ = 0.0, y_end_ = 0.0;
  std::vector<DenseStep> steps_;
  std::size_t rejected_ = 0;
};

// Integrates from t0 to t1 (either direction). Right-hand sides that throw
// SingularityError/DomainError or return non-finite values reject the step;
// SingularityError is raised with the failing time once the step size collapses.
OdeSolution integrate_dopri5(const std::function<double(double, double)>& f, double t0, double y0, double t1,
                             const OdeOptions& options = {});

}  // namespace gcfl
