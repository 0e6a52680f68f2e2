#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace vinemeta {

enum class CopulaFamily {
    Independence,
    BVN,
    Frank,
    Clayton,
    Clayton90,
    Clayton180,
    Clayton270,
    Comonotonic,
    Countermonotonic,
};

/// Thrown when a density is requested for a copula that has none
/// (comonotonic / countermonotonic).
struct SingularCopulaError : std::domain_error {
    using std::domain_error::domain_error;
};

bool family_has_parameter(CopulaFamily f);

/// Parametric bivariate copula.  Parameter domains: BVN rho in (-1,1),
/// Frank theta != 0, Clayton (all rotations) theta > 0.  Parameterless
/// families ignore theta.
class PairCopula {
  public:
    PairCopula() : family_(CopulaFamily::Independence), theta_(0.0) {}
    PairCopula(CopulaFamily family, double theta = 0.0);

    CopulaFamily family() const { return family_; }
    double theta() const { return theta_; }

    double cdf(double u, double v) const;
    double density(double u, double v) const;
    /// C(v|u) = dC(u,v)/du; u must be interior.
    double cond_cdf(double v, double u) const;
    /// v with cond_cdf(v,u) = q; comonotonic returns u, countermonotonic 1-u.
    double inv_cond_cdf(double q, double u) const;

    double kendall_tau() const;

    bool is_singular() const {
        return family_ == CopulaFamily::Comonotonic ||
               family_ == CopulaFamily::Countermonotonic;
    }

  private:
    CopulaFamily family_;
    double theta_;
};

/// Inverse of kendall_tau within a family; Frank is inverted by bisection.
double tau_to_theta(CopulaFamily family, double tau);

/// Attainable Kendall-tau range of a family (closed bounds).
std::pair<double, double> tau_range(CopulaFamily family);

/// Build the copula attaining Kendall tau `tau` within `family`
/// (Independence when |tau| is negligible).
PairCopula copula_from_tau(CopulaFamily family, double tau);

/// The Cln{w1,w2} constructs: one family for tau > 0, another for tau <= 0.
struct MixedSignFamily {
    CopulaFamily positive_branch;
    CopulaFamily negative_branch;

    CopulaFamily branch(double tau) const {
        return tau > 0.0 ? positive_branch : negative_branch;
    }
};

/// A fit candidate: either a single family used at every tau sign, or a
/// mixed-sign pair.  Parsed from names like "bvn" or "cln0-90".
struct FamilyChoice {
    CopulaFamily positive;
    CopulaFamily negative;

    CopulaFamily branch(double tau) const { return tau > 0.0 ? positive : negative; }
    std::pair<double, double> tau_span() const;
};

FamilyChoice parse_family(const std::string& name);
std::string family_name(const FamilyChoice& choice);
std::string family_name(CopulaFamily f);

}  // namespace vinemeta
