#include "gcfl/sampling.hpp"

#include <cmath>
#include <numbers>

namespace gcfl {

SurfaceSampler::SurfaceSampler(const SurfaceSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}

double SurfaceSampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

Vec3 SurfaceSampler::unit_vector() {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Vec3 v(normal(rng_), normal(rng_), normal(rng_));
    const double n = v.norm();
    if (n > 1e-8) return v / n;
  }
}

Vec3 SurfaceSampler::unit_ball() {
  for (;;) {
    Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    if (v.squaredNorm() <= 1.0) return v;
  }
}

Vec3 SurfaceSampler::torus_point_in_band(double sin_lo, double sin_hi) {
  const auto& t = *spec_.torus;
  const double s = uniform(sin_lo, sin_hi);
  double theta = std::asin(s);
  if (uniform(0, 1) < 0.5) theta = std::numbers::pi - theta;
  return torus_point(t.a, t.b, theta, uniform(0, 2 * std::numbers::pi));
}

Vec3 SurfaceSampler::point() {
  switch (spec_.kind) {
    case SurfaceKind::torus: {
      const auto& t = *spec_.torus;
      return torus_point(t.a, t.b, uniform(0, 2 * std::numbers::pi), uniform(0, 2 * std::numbers::pi));
    }
    case SurfaceKind::plane_curve_cylinder: {
      const auto& c = *spec_.curve;
      const double x = uniform(c.lo(), c.hi());
      return {x, c.profile()(x), uniform(-1, 1)};
    }
    case SurfaceKind::quadric: {
      // Rays from the centre: t^2 * sum(alpha_i d_i^2 / a_i^2) = delta.
      const auto& q = *spec_.quadric;
      if (q.delta == 0) throw ValidationError("ray sampling needs a quadric with delta != 0");
      for (int attempt = 0; attempt < 100000; ++attempt) {
        const Vec3 d = unit_vector();
        const double s = q.alpha * d(0) * d(0) / (q.a * q.a) + q.beta * d(1) * d(1) / (q.b * q.b) +
                         q.gamma * d(2) * d(2) / (q.c * q.c);
        const double s_delta = s / q.delta;
        // Keep well-conditioned hits; grazing rays land far out on hyperboloids.
        if (s_delta > 0.05) return std::sqrt(1.0 / s_delta) * d;
      }
      throw ConvergenceError("no ray hit the quadric");
    }
    case SurfaceKind::implicit: {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        try {
          return project_to_surface(spec_, unit_vector());
        } catch (const Error&) {
        }
      }
      throw ConvergenceError("could not sample a point on the implicit surface");
    }
  }
  throw Error("unknown surface kind");
}

}  // namespace gcfl
