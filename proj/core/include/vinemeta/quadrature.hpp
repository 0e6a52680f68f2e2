#pragma once

#include <vector>

namespace vinemeta {

/// Gauss-Legendre rule mapped to the unit interval.
///
/// Nodes are strictly increasing and symmetric about 0.5; weights are
/// positive and sum to 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule on (0,1), exact for polynomials of degree
/// <= 2n-1.  Roots of the Legendre polynomial are found by Newton
/// iteration from Chebyshev initial guesses.  Requires 1 <= n <= 100.
QuadratureRule gauss_legendre(int n);

inline constexpr int kDefaultQuadSize = 15;

}  // namespace vinemeta
