#pragma once

// Static SVG line plots of q profiles: q_x and q_y solid, q_z dotted.

#include "gcfl/q_factor.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gcfl {

struct PlotOptions {
  std::string title;
  int width = 640;
  int height = 420;
};

void write_profiles_svg(const std::vector<QFactorProfile>& profiles, std::ostream& out,
                        const PlotOptions& options = {});

}  // namespace gcfl
