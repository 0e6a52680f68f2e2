#include "vinemeta/rng.hpp"

#include "vinemeta/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace vinemeta {

double gamma_draw(Rng& rng, double shape, double rate) {
    if (shape < 1.0) {
        double u = rng.uniform();
        return gamma_draw(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = norm_quantile(rng.uniform());
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = rng.uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
            return d * v / rate;
    }
}

std::vector<int> multinomial_draw(Rng& rng, int n, const std::vector<double>& p) {
    std::vector<int> counts(p.size(), 0);
    // Sequential conditional binomials via inverse-cdf uniform splitting.
    double remaining = 1.0;
    int left = n;
    for (std::size_t j = 0; j + 1 < p.size() && left > 0; ++j) {
        double pj = std::min(1.0, std::max(0.0, p[j] / remaining));
        int c = 0;
        for (int i = 0; i < left; ++i)
            if (rng.uniform() < pj) ++c;
        counts[j] = c;
        left -= c;
        remaining -= p[j];
        if (remaining <= 0.0) break;
    }
    counts[p.size() - 1] += left;
    return counts;
}

}  // namespace vinemeta
