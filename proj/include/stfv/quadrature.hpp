#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "stfv/errors.hpp"

namespace stfv {

/// Gauss-Legendre rule mapped to [0, 1]; weights sum to one.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int order() const { return static_cast<int>(nodes.size()); }

  static QuadratureRule gauss_legendre(int order);
};

inline QuadratureRule QuadratureRule::gauss_legendre(int order) {
  if (order < 1) {
    throw DomainError("quadrature order must be positive, got " +
                      std::to_string(order));
  }
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int n = order;
  // Newton iteration on P_n for each root of the symmetric pair.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x_i is the i-th largest root; map [-1, 1] -> [0, 1] in increasing order.
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[n - 1 - i] = 0.5 * w;
    rule.weights[i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

}  // namespace stfv
