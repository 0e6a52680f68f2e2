#include "vinemeta/margins.hpp"

#include "vinemeta/normal.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vinemeta {

bool ProbTriplet::valid() const {
    return p10 > 0.0 && p01 > 0.0 && p11 > 0.0 && remainder() > 0.0;
}

std::array<double, 3> mlogit(const ProbTriplet& p) {
    if (!p.valid())
        throw std::domain_error("mlogit: probabilities must be interior to the simplex");
    double lr = std::log(p.remainder());
    return {std::log(p.p10) - lr, std::log(p.p01) - lr, std::log(p.p11) - lr};
}

ProbTriplet mlogit_inv(const std::array<double, 3>& x) {
    double m = std::max(0.0, std::max(x[0], std::max(x[1], x[2])));
    double e0 = std::exp(x[0] - m), e1 = std::exp(x[1] - m), e2 = std::exp(x[2] - m);
    double den = std::exp(-m) + e0 + e1 + e2;
    return {e0 / den, e1 / den, e2 / den};
}

std::array<double, 3> conditional_from_joint(const ProbTriplet& p) {
    if (!p.valid())
        throw std::domain_error("conditional_from_joint: invalid probability triplet");
    double m1 = p.p10;
    double m2 = p.p01 / (1.0 - m1);
    double m3 = p.p11 / ((1.0 - m2) * (1.0 - m1));
    if (m2 >= 1.0 || m3 >= 1.0)
        throw std::domain_error("conditional_from_joint: conditional mean >= 1");
    return {m1, m2, m3};
}

ProbTriplet joint_from_conditional(const std::array<double, 3>& x) {
    return {x[0], x[1] * (1.0 - x[0]), x[2] * (1.0 - x[1]) * (1.0 - x[0])};
}

double normal_quantile(const NormalMargin& m, double u) {
    return m.mu + m.sigma * norm_quantile(u);
}

double beta_quantile(const BetaMargin& m, double u) {
    u = std::min(1.0 - 1e-16, std::max(1e-300, u));
    return boost::math::ibeta_inv(m.alpha(), m.beta(), u);
}

namespace {
/// Quantile at u = Phi(z), routed through the complementary tail for z > 0
/// where 1 - Phi(z) would be lost to rounding in the direct path.
double beta_quantile_z(const BetaMargin& m, double z) {
    double a = m.alpha(), b = m.beta();
    try {
        if (z <= 0.0)
            return boost::math::ibeta_inv(a, b, std::max(1e-300, norm_cdf(z)));
        return boost::math::ibetac_inv(a, b, std::max(1e-300, norm_cdf(-z)));
    } catch (const std::exception&) {
        // the specialised inverse can exhaust its iteration budget for
        // extreme shape parameters; bisection on the monotone cdf always
        // converges, just more slowly
        bool upper = z > 0.0;
        double target = std::max(1e-300, norm_cdf(upper ? -z : z));
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            double mid = 0.5 * (lo + hi);
            double val = upper ? boost::math::ibetac(a, b, mid)
                               : boost::math::ibeta(a, b, mid);
            bool go_right = upper ? val > target : val < target;
            (go_right ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
}
}  // namespace

double beta_cdf(const BetaMargin& m, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(m.alpha(), m.beta(), x);
}

double beta_pdf(const BetaMargin& m, double x) {
    double a = m.alpha(), b = m.beta();
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(boost::math::lgamma(a + b) - boost::math::lgamma(a) -
                    boost::math::lgamma(b) + (a - 1.0) * std::log(x) +
                    (b - 1.0) * std::log1p(-x));
}

BetaQuantileGrid::BetaQuantileGrid(const BetaMargin& m, int n_intervals)
    : margin_(m), z_lo_(-8.5), z_hi_(8.5) {
    int n = n_intervals + 1;
    h_ = (z_hi_ - z_lo_) / n_intervals;
    x_.resize(n);
    d_.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = z_lo_ + i * h_;
        double x = beta_quantile_z(margin_, z);
        x_[i] = x;
        double f = beta_pdf(margin_, x);
        // dx/dz = phi(z)/f(x); guard the flat tails.
        d_[i] = f > 1e-280 ? norm_pdf(z) / f : 0.0;
    }
}

double BetaQuantileGrid::from_z(double z) const {
    if (x_.empty() || z <= z_lo_ || z >= z_hi_) return beta_quantile_z(margin_, z);
    double s = (z - z_lo_) / h_;
    int i = static_cast<int>(s);
    double t = s - i;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2.0 * t3 - 3.0 * t2 + 1.0, h10 = t3 - 2.0 * t2 + t;
    double h01 = -2.0 * t3 + 3.0 * t2, h11 = t3 - t2;
    return h00 * x_[i] + h10 * h_ * d_[i] + h01 * x_[i + 1] + h11 * h_ * d_[i + 1];
}

double BetaQuantileGrid::from_u(double u) const { return from_z(norm_quantile(u)); }

double BetaQuantileGrid::probe_error(int n_probe) const {
    double worst = 0.0;
    for (int i = 1; i < n_probe; ++i) {
        double z = z_lo_ + (z_hi_ - z_lo_) * (i + 0.37) / n_probe;
        double err = std::abs(from_z(z) - beta_quantile_z(margin_, z));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace vinemeta
