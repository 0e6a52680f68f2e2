#include "vinemeta/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace vinemeta {

QuadratureRule gauss_legendre(int n) {
    if (n < 1 || n > 100)
        throw std::invalid_argument("gauss_legendre: n must be in [1,100]");

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev guess for the i-th root of P_n on [-1,1].
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P_n'(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1,1] to [0,1]; roots come out in decreasing order.
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.5;  // exact midpoint
    return rule;
}

}  // namespace vinemeta
