#pragma once

#include <functional>
#include <vector>

namespace cagesim {

/// Composite Gauss-Legendre nodes and weights covering [0, 2pi).
///
/// Panel edges include every breakpoint (reduced mod 2pi) so no panel
/// straddles a kink; remaining length is split so the total panel count is at
/// least `min_panels`. Weights already include the 1/(2pi) factor, so
/// sum(w_i f(x_i)) is the circular mean of f.
struct CircleRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static CircleRule build(std::vector<double> breakpoints, int min_panels);
  double mean(const std::function<double(double)>& f) const;
};

}  // namespace cagesim
