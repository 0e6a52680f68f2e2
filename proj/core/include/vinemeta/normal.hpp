#pragma once

#include <cmath>

namespace vinemeta {

inline double norm_pdf(double z) {
    return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}

inline double norm_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

/// Standard normal quantile (Acklam rational approximation plus one
/// Halley refinement; absolute error below 5e-16 on (0,1)).
double norm_quantile(double p);

/// Standard bivariate normal cdf P(Z1 <= x, Z2 <= y) with correlation rho
/// (Genz's adaptation of the Drezner-Wesolowsky algorithm).
double bvn_cdf(double x, double y, double rho);

}  // namespace vinemeta
