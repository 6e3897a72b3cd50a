#include "kronspec/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace kronspec {

double QuadratureRule::total_mass() const {
  double acc = 0.0;
  for (double w : weights) acc += w;
  return acc;
}

QuadratureRule gauss_chebyshev_rule(int order) {
  if (order < 1) throw std::invalid_argument("gauss_chebyshev_rule: order must be >= 1");
  QuadratureRule rule;
  rule.target = "semicircle(0,1)";
  rule.exactness_degree = 2 * order - 1;
  rule.nodes.reserve(order);
  rule.weights.reserve(order);
  const double step = std::numbers::pi / (order + 1);
  for (int j = 1; j <= order; ++j) {
    const double s = std::sin(j * step);
    rule.nodes.push_back(2.0 * std::cos(j * step));
    rule.weights.push_back(2.0 / (order + 1) * s * s);
  }
  return rule;
}

}  // namespace kronspec
