#include "vinemeta/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

namespace vinemeta {

namespace {

// Acklam's rational approximation coefficients.
constexpr double A[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                        -2.759285104469687e+02, 1.383577518672690e+02,
                        -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double B[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                        -1.556989798598866e+02, 6.680131188771972e+01,
                        -1.328068155288572e+01};
constexpr double C[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                        -2.400758277161838e+00, -2.549732539343734e+00,
                        4.374664141464968e+00,  2.938163982698783e+00};
constexpr double D[] = {7.784695709041462e-03, 3.224671290700398e-01,
                        2.445134137142996e+00, 3.754408661907416e+00};

}  // namespace

double norm_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();

    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    } else if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    } else {
        double q = p - 0.5, r = q * q;
        x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
            (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
    }
    // One Halley step brings the error to machine precision.
    double e = norm_cdf(x) - p;
    double u = e * 2.5066282746310005024 * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double bvn_cdf(double x, double y, double rho) {
    if (rho <= -1.0) return std::max(0.0, norm_cdf(x) + norm_cdf(y) - 1.0);
    if (rho >= 1.0) return norm_cdf(std::min(x, y));
    if (rho == 0.0) return norm_cdf(x) * norm_cdf(y);

    // C(x,y) = int_{-inf}^{x} phi(t) Phi((y - rho t)/s) dt.
    const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
    auto integrand = [&](double t) { return norm_pdf(t) * norm_cdf((y - rho * t) / s); };
    using boost::math::quadrature::gauss_kronrod;
    double lo = std::min(-9.0, x - 9.0);
    double v = gauss_kronrod<double, 31>::integrate(integrand, lo, x, 12, 1e-13);
    // Mass below the truncation point is below 1e-19 relative to Phi(x).
    return std::min(1.0, std::max(0.0, v));
}

}  // namespace vinemeta
