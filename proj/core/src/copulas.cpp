#include "vinemeta/copulas.hpp"

#include "vinemeta/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace vinemeta {

namespace {

constexpr double kUMin = 1e-12;
constexpr double kUMax = 1.0 - 1e-12;

double clamp01(double u) { return std::min(kUMax, std::max(kUMin, u)); }

void check_theta(CopulaFamily f, double theta) {
    switch (f) {
        case CopulaFamily::BVN:
            if (!(theta > -1.0 && theta < 1.0))
                throw std::domain_error("BVN rho must lie in (-1,1)");
            break;
        case CopulaFamily::Frank:
            if (theta == 0.0 || !std::isfinite(theta))
                throw std::domain_error("Frank theta must be finite and nonzero");
            break;
        case CopulaFamily::Clayton:
        case CopulaFamily::Clayton90:
        case CopulaFamily::Clayton180:
        case CopulaFamily::Clayton270:
            if (!(theta > 0.0) || !std::isfinite(theta))
                throw std::domain_error("Clayton theta must be positive");
            break;
        default:
            break;
    }
}

// --- base-family closed forms (Clayton/Frank/BVN, unrotated) ---

double clayton_cdf(double u, double v, double t) {
    return std::pow(std::pow(u, -t) + std::pow(v, -t) - 1.0, -1.0 / t);
}

double clayton_density(double u, double v, double t) {
    double s = std::pow(u, -t) + std::pow(v, -t) - 1.0;
    return (1.0 + t) * std::pow(u * v, -t - 1.0) * std::pow(s, -2.0 - 1.0 / t);
}

double clayton_cond(double v, double u, double t) {
    double s = std::pow(u, -t) + std::pow(v, -t) - 1.0;
    return std::pow(u, -t - 1.0) * std::pow(s, -1.0 / t - 1.0);
}

double clayton_inv_cond(double q, double u, double t) {
    double w = (std::pow(q, -t / (1.0 + t)) - 1.0) * std::pow(u, -t) + 1.0;
    return std::pow(w, -1.0 / t);
}

double frank_cdf(double u, double v, double t) {
    double a = std::expm1(-t);
    double au = std::expm1(-t * u), av = std::expm1(-t * v);
    return -std::log1p(au * av / a) / t;
}

double frank_density(double u, double v, double t) {
    double a = std::expm1(-t);
    double au = std::expm1(-t * u), av = std::expm1(-t * v);
    double den = a + au * av;
    return -t * a * std::exp(-t * (u + v)) / (den * den);
}

double frank_cond(double v, double u, double t) {
    double a = std::expm1(-t);
    double au = std::expm1(-t * u), av = std::expm1(-t * v);
    return std::exp(-t * u) * av / (a + au * av);
}

double frank_inv_cond(double q, double u, double t) {
    double a = std::expm1(-t);
    double eu = std::exp(-t * u);
    double av = q * a / (eu - q * (eu - 1.0));
    return -std::log1p(av) / t;
}

double bvn_density_uv(double u, double v, double rho) {
    double x = norm_quantile(u), y = norm_quantile(v);
    double s2 = (1.0 - rho) * (1.0 + rho);
    double e = rho * (rho * (x * x + y * y) - 2.0 * x * y) / (2.0 * s2);
    return std::exp(-e) / std::sqrt(s2);
}

double frank_debye_integral(double t) {
    // int_0^t x/(e^x - 1) dx; the integrand extends continuously to 1 at 0.
    auto f = [](double x) { return x > 1e-8 ? x / std::expm1(x) : 1.0 - 0.5 * x; };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 12,
                                                                         1e-12);
}

double frank_tau(double theta) {
    if (std::abs(theta) < 1e-5) return theta / 9.0;  // removable singularity at 0
    if (theta < 0.0) return -frank_tau(-theta);
    return 1.0 - 4.0 / theta +
           4.0 / (theta * theta) * frank_debye_integral(theta);
}

}  // namespace

bool family_has_parameter(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Independence:
        case CopulaFamily::Comonotonic:
        case CopulaFamily::Countermonotonic:
            return false;
        default:
            return true;
    }
}

PairCopula::PairCopula(CopulaFamily family, double theta)
    : family_(family), theta_(theta) {
    if (!family_has_parameter(family)) {
        theta_ = 0.0;
        return;
    }
    check_theta(family, theta);
}

double PairCopula::cdf(double u, double v) const {
    u = std::min(1.0, std::max(0.0, u));
    v = std::min(1.0, std::max(0.0, v));
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    switch (family_) {
        case CopulaFamily::Independence:
            return u * v;
        case CopulaFamily::Comonotonic:
            return std::min(u, v);
        case CopulaFamily::Countermonotonic:
            return std::max(u + v - 1.0, 0.0);
        case CopulaFamily::BVN:
            return bvn_cdf(norm_quantile(u), norm_quantile(v), theta_);
        case CopulaFamily::Frank:
            return frank_cdf(u, v, theta_);
        case CopulaFamily::Clayton:
            return clayton_cdf(u, v, theta_);
        case CopulaFamily::Clayton90:
            return v - clayton_cdf(1.0 - u, v, theta_);
        case CopulaFamily::Clayton180:
            return u + v - 1.0 + clayton_cdf(1.0 - u, 1.0 - v, theta_);
        case CopulaFamily::Clayton270:
            return u - clayton_cdf(u, 1.0 - v, theta_);
    }
    return 0.0;
}

double PairCopula::density(double u, double v) const {
    if (is_singular())
        throw SingularCopulaError("density undefined for a Frechet-bound copula");
    u = clamp01(u);
    v = clamp01(v);
    switch (family_) {
        case CopulaFamily::Independence:
            return 1.0;
        case CopulaFamily::BVN:
            return bvn_density_uv(u, v, theta_);
        case CopulaFamily::Frank:
            return frank_density(u, v, theta_);
        case CopulaFamily::Clayton:
            return clayton_density(u, v, theta_);
        case CopulaFamily::Clayton90:
            return clayton_density(1.0 - u, v, theta_);
        case CopulaFamily::Clayton180:
            return clayton_density(1.0 - u, 1.0 - v, theta_);
        case CopulaFamily::Clayton270:
            return clayton_density(u, 1.0 - v, theta_);
        default:
            return 1.0;
    }
}

double PairCopula::cond_cdf(double v, double u) const {
    if (u <= 0.0 || u >= 1.0)
        throw std::domain_error("cond_cdf: conditioning argument on the boundary");
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    u = clamp01(u);
    v = clamp01(v);
    switch (family_) {
        case CopulaFamily::Independence:
            return v;
        case CopulaFamily::Comonotonic:
            return v < u ? 0.0 : 1.0;
        case CopulaFamily::Countermonotonic:
            return v < 1.0 - u ? 0.0 : 1.0;
        case CopulaFamily::BVN: {
            double x = norm_quantile(u), y = norm_quantile(v);
            double s = std::sqrt((1.0 - theta_) * (1.0 + theta_));
            return norm_cdf((y - theta_ * x) / s);
        }
        case CopulaFamily::Frank:
            return frank_cond(v, u, theta_);
        case CopulaFamily::Clayton:
            return clayton_cond(v, u, theta_);
        case CopulaFamily::Clayton90:
            return clayton_cond(v, 1.0 - u, theta_);
        case CopulaFamily::Clayton180:
            return 1.0 - clayton_cond(1.0 - v, 1.0 - u, theta_);
        case CopulaFamily::Clayton270:
            return 1.0 - clayton_cond(1.0 - v, u, theta_);
    }
    return v;
}

double PairCopula::inv_cond_cdf(double q, double u) const {
    u = clamp01(u);
    q = clamp01(q);
    switch (family_) {
        case CopulaFamily::Independence:
            return q;
        case CopulaFamily::Comonotonic:
            return u;
        case CopulaFamily::Countermonotonic:
            return 1.0 - u;
        case CopulaFamily::BVN: {
            double x = norm_quantile(u);
            double s = std::sqrt((1.0 - theta_) * (1.0 + theta_));
            return norm_cdf(theta_ * x + s * norm_quantile(q));
        }
        case CopulaFamily::Frank:
            return clamp01(frank_inv_cond(q, u, theta_));
        case CopulaFamily::Clayton:
            return clamp01(clayton_inv_cond(q, u, theta_));
        case CopulaFamily::Clayton90:
            return clamp01(clayton_inv_cond(q, 1.0 - u, theta_));
        case CopulaFamily::Clayton180:
            return clamp01(1.0 - clayton_inv_cond(1.0 - q, 1.0 - u, theta_));
        case CopulaFamily::Clayton270:
            return clamp01(1.0 - clayton_inv_cond(1.0 - q, u, theta_));
    }
    return q;
}

double PairCopula::kendall_tau() const {
    switch (family_) {
        case CopulaFamily::Independence:
            return 0.0;
        case CopulaFamily::Comonotonic:
            return 1.0;
        case CopulaFamily::Countermonotonic:
            return -1.0;
        case CopulaFamily::BVN:
            return 2.0 / M_PI * std::asin(theta_);
        case CopulaFamily::Frank:
            return frank_tau(theta_);
        case CopulaFamily::Clayton:
        case CopulaFamily::Clayton180:
            return theta_ / (theta_ + 2.0);
        case CopulaFamily::Clayton90:
        case CopulaFamily::Clayton270:
            return -theta_ / (theta_ + 2.0);
    }
    return 0.0;
}

std::pair<double, double> tau_range(CopulaFamily family) {
    switch (family) {
        case CopulaFamily::Independence:
            return {0.0, 0.0};
        case CopulaFamily::BVN:
        case CopulaFamily::Frank:
            return {-1.0, 1.0};
        case CopulaFamily::Clayton:
        case CopulaFamily::Clayton180:
            return {0.0, 1.0};
        case CopulaFamily::Clayton90:
        case CopulaFamily::Clayton270:
            return {-1.0, 0.0};
        case CopulaFamily::Comonotonic:
            return {1.0, 1.0};
        case CopulaFamily::Countermonotonic:
            return {-1.0, -1.0};
    }
    return {0.0, 0.0};
}

double tau_to_theta(CopulaFamily family, double tau) {
    auto [lo, hi] = tau_range(family);
    if (tau < lo || tau > hi)
        throw std::range_error("tau_to_theta: tau outside the family's range");
    switch (family) {
        case CopulaFamily::BVN:
            return std::sin(M_PI * tau / 2.0);
        case CopulaFamily::Clayton:
        case CopulaFamily::Clayton180:
            return 2.0 * tau / (1.0 - tau);
        case CopulaFamily::Clayton90:
        case CopulaFamily::Clayton270:
            return -2.0 * tau / (1.0 + tau);
        case CopulaFamily::Frank: {
            if (tau < 0.0) return -tau_to_theta(family, -tau);
            if (tau < 1e-6) return 9.0 * tau;
            double a = 1e-8, b = 1.0;
            while (frank_tau(b) < tau) b *= 2.0;  // tau(700) > 0.994
            for (int i = 0; i < 80; ++i) {
                double m = 0.5 * (a + b);
                (frank_tau(m) < tau ? a : b) = m;
                if (b - a < 1e-13 * (1.0 + b)) break;
            }
            return 0.5 * (a + b);
        }
        default:
            throw std::domain_error("tau_to_theta: family has no parameter");
    }
}

PairCopula copula_from_tau(CopulaFamily family, double tau) {
    if (!family_has_parameter(family)) return PairCopula(family);
    if (std::abs(tau) < 1e-8) return PairCopula(CopulaFamily::Independence);
    return PairCopula(family, tau_to_theta(family, tau));
}

std::pair<double, double> FamilyChoice::tau_span() const {
    auto p = tau_range(positive), n = tau_range(negative);
    return {std::min(p.first, n.first), std::max(p.second, n.second)};
}

FamilyChoice parse_family(const std::string& name) {
    using F = CopulaFamily;
    if (name == "independence") return {F::Independence, F::Independence};
    if (name == "bvn") return {F::BVN, F::BVN};
    if (name == "frank") return {F::Frank, F::Frank};
    if (name == "cln0") return {F::Clayton, F::Clayton};
    if (name == "cln90") return {F::Clayton90, F::Clayton90};
    if (name == "cln180") return {F::Clayton180, F::Clayton180};
    if (name == "cln270") return {F::Clayton270, F::Clayton270};
    if (name == "cln0-90") return {F::Clayton, F::Clayton90};
    if (name == "cln0-270") return {F::Clayton, F::Clayton270};
    if (name == "cln180-90") return {F::Clayton180, F::Clayton90};
    if (name == "cln180-270") return {F::Clayton180, F::Clayton270};
    if (name == "comonotonic") return {F::Comonotonic, F::Comonotonic};
    if (name == "countermonotonic")
        return {F::Countermonotonic, F::Countermonotonic};
    throw std::invalid_argument("unknown copula family: " + name);
}

std::string family_name(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Independence: return "independence";
        case CopulaFamily::BVN: return "bvn";
        case CopulaFamily::Frank: return "frank";
        case CopulaFamily::Clayton: return "cln0";
        case CopulaFamily::Clayton90: return "cln90";
        case CopulaFamily::Clayton180: return "cln180";
        case CopulaFamily::Clayton270: return "cln270";
        case CopulaFamily::Comonotonic: return "comonotonic";
        case CopulaFamily::Countermonotonic: return "countermonotonic";
    }
    return "?";
}

std::string family_name(const FamilyChoice& choice) {
    if (choice.positive == choice.negative) return family_name(choice.positive);
    std::string p = family_name(choice.positive), n = family_name(choice.negative);
    // cln0-90 style composites
    return p + "-" + n.substr(3);
}

}  // namespace vinemeta
