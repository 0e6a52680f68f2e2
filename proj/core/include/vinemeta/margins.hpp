#pragma once

#include <array>
#include <vector>

namespace vinemeta {

/// Cell probabilities (+-, -+, ++) of one disease arm; the remainder cell
/// (--) carries 1 - p10 - p01 - p11.
struct ProbTriplet {
    double p10 = 0.0;
    double p01 = 0.0;
    double p11 = 0.0;

    double remainder() const { return 1.0 - p10 - p01 - p11; }
    bool valid() const;
    double operator[](int j) const { return j == 0 ? p10 : (j == 1 ? p01 : p11); }
};

struct NormalMargin {
    double mu = 0.0;
    double sigma = 1.0;  // > 0
};

/// Beta in mean/dispersion form: mean pi, Var = gamma*pi*(1-pi);
/// shapes alpha = pi(1-gamma)/gamma, beta = (1-pi)(1-gamma)/gamma.
struct BetaMargin {
    double pi = 0.5;
    double gamma = 0.1;  // both in (0,1)

    double alpha() const { return pi * (1.0 - gamma) / gamma; }
    double beta() const { return (1.0 - pi) * (1.0 - gamma) / gamma; }
};

/// Multinomial logit link: component j = log(p_j / remainder).
std::array<double, 3> mlogit(const ProbTriplet& p);

/// Inverse link, stabilized by max-subtraction.
ProbTriplet mlogit_inv(const std::array<double, 3>& x);

/// Conditional means of the sequential-proportion transform:
/// m1 = p1, m2 = p2/(1-m1), m3 = p3/((1-m2)(1-m1)).
std::array<double, 3> conditional_from_joint(const ProbTriplet& p);

/// Inverse of conditional_from_joint: (x1, x2(1-x1), x3(1-x2)(1-x1)).
ProbTriplet joint_from_conditional(const std::array<double, 3>& x);

double normal_quantile(const NormalMargin& m, double u);
double beta_quantile(const BetaMargin& m, double u);
double beta_cdf(const BetaMargin& m, double x);
double beta_pdf(const BetaMargin& m, double x);

/// Monotone cubic Hermite interpolant of u -> F^{-1}(u;pi,gamma) sampled on
/// the normal-quantile scale (x_i at u = Phi(z_i), z uniform on [-8.5,8.5]).
/// Built once per parameter vector; evaluation from z avoids the per-point
/// incomplete-beta inversion in the likelihood's inner loops.  Falls back to
/// the exact inversion outside the tabulated range.
class BetaQuantileGrid {
  public:
    BetaQuantileGrid() = default;
    explicit BetaQuantileGrid(const BetaMargin& m, int n_intervals = 4096);

    double from_z(double z) const;
    double from_u(double u) const;

    /// Max |grid - exact| over a dense probe; used by tests.
    double probe_error(int n_probe = 2000) const;

  private:
    BetaMargin margin_;
    double z_lo_ = 0.0, z_hi_ = 0.0, h_ = 1.0;
    std::vector<double> x_;   // values
    std::vector<double> d_;   // dx/dz
};

}  // namespace vinemeta
