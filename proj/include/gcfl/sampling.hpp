#pragma once

// Seeded random points on surfaces, used by property checks and CLI sweeps.

#include "gcfl/surface.hpp"

#include <cstdint>
#include <random>

namespace gcfl {

class SurfaceSampler {
 public:
  SurfaceSampler(const SurfaceSpec& spec, std::uint64_t seed);

  // A point on the surface. Torus points use the full chart; cylinder points
  // take x inside the curve domain and z in [-1, 1].
  Vec3 point();

  // Torus point with sin(theta) restricted to [lo, hi] (either sign of cos(theta)).
  Vec3 torus_point_in_band(double sin_lo, double sin_hi);

  // Uniform sample from the unit ball.
  Vec3 unit_ball();

  double uniform(double lo, double hi);
  std::mt19937_64& engine() { return rng_; }

 private:
  Vec3 unit_vector();

  const SurfaceSpec& spec_;
  std::mt19937_64 rng_;
};

}  // namespace gcfl
