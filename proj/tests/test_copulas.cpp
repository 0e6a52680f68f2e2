#include "vinemeta/copulas.hpp"
#include "vinemeta/quadrature.hpp"
#include "vinemeta/rng.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace vinemeta;

namespace {

std::vector<PairCopula> parametric_samples() {
    return {
        {CopulaFamily::BVN, 0.6},        {CopulaFamily::BVN, -0.35},
        {CopulaFamily::Frank, 5.0},      {CopulaFamily::Frank, -3.0},
        {CopulaFamily::Clayton, 2.0},    {CopulaFamily::Clayton, 0.4},
        {CopulaFamily::Clayton90, 1.5},  {CopulaFamily::Clayton180, 2.0},
        {CopulaFamily::Clayton270, 0.8}, {CopulaFamily::Independence},
    };
}

}  // namespace

TEST_CASE("closed-form spot values") {
    PairCopula ind(CopulaFamily::Independence);
    CHECK(ind.cdf(0.3, 0.7) == doctest::Approx(0.21).epsilon(1e-14));
    CHECK(ind.density(0.2, 0.9) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ind.cond_cdf(0.7, 0.2) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(ind.inv_cond_cdf(0.25, 0.9) == doctest::Approx(0.25).epsilon(1e-12));

    PairCopula como(CopulaFamily::Comonotonic);
    CHECK(como.cdf(0.3, 0.7) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(como.inv_cond_cdf(0.4, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    PairCopula counter(CopulaFamily::Countermonotonic);
    CHECK(counter.inv_cond_cdf(0.4, 0.3) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK_THROWS_AS(como.density(0.5, 0.5), SingularCopulaError);
    CHECK_THROWS_AS(counter.density(0.5, 0.5), SingularCopulaError);

    PairCopula cl(CopulaFamily::Clayton, 2.0);
    CHECK(cl.cdf(0.5, 0.5) == doctest::Approx(std::pow(7.0, -0.5)).epsilon(1e-12));
    CHECK(cl.cond_cdf(0.5, 0.5) ==
          doctest::Approx(8.0 * std::pow(7.0, -1.5)).epsilon(1e-12));

    PairCopula bvn0(CopulaFamily::BVN, 0.0);
    CHECK(bvn0.density(0.4, 0.6) == doctest::Approx(1.0).epsilon(1e-12));
    PairCopula bvn(CopulaFamily::BVN, 0.5);
    CHECK(bvn.inv_cond_cdf(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("parameter domain errors") {
    CHECK_THROWS(PairCopula(CopulaFamily::BVN, 1.5));
    CHECK_THROWS(PairCopula(CopulaFamily::Clayton, -1.0));
    CHECK_THROWS(PairCopula(CopulaFamily::Frank, 0.0));
}

TEST_CASE("Frank density matches the mixed partial of the cdf") {
    PairCopula c(CopulaFamily::Frank, 5.0);
    const double h = 1e-5;
    for (double u : {0.2, 0.5, 0.8})
        for (double v : {0.3, 0.5, 0.7}) {
            double num =
                (c.cdf(u + h, v + h) - c.cdf(u + h, v - h) - c.cdf(u - h, v + h) +
                 c.cdf(u - h, v - h)) /
                (4.0 * h * h);
            CHECK(c.density(u, v) == doctest::Approx(num).epsilon(1e-4));
        }
}

TEST_CASE("boundary identities and Frechet bounds") {
    for (const auto& c : parametric_samples()) {
        for (double t = 0.05; t < 1.0; t += 0.15) {
            CHECK(c.cdf(t, 1.0) == doctest::Approx(t).epsilon(1e-9));
            CHECK(c.cdf(1.0, t) == doctest::Approx(t).epsilon(1e-9));
            CHECK(c.cdf(t, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(c.cdf(0.0, t) == doctest::Approx(0.0).epsilon(1e-9));
        }
        for (double u = 0.05; u < 1.0; u += 0.1)
            for (double v = 0.05; v < 1.0; v += 0.1) {
                double val = c.cdf(u, v);
                CHECK(val >= std::max(u + v - 1.0, 0.0) - 1e-12);
                CHECK(val <= std::min(u, v) + 1e-12);
            }
    }
}

TEST_CASE("2-increasing property") {
    for (const auto& c : parametric_samples())
        for (double u1 = 0.1; u1 < 0.9; u1 += 0.2)
            for (double v1 = 0.1; v1 < 0.9; v1 += 0.2) {
                double u2 = u1 + 0.1, v2 = v1 + 0.1;
                CHECK(c.cdf(u2, v2) - c.cdf(u2, v1) - c.cdf(u1, v2) +
                          c.cdf(u1, v1) >=
                      -1e-12);
            }
}

TEST_CASE("densities integrate to one") {
    auto rule = gauss_legendre(50);
    for (const auto& c : parametric_samples()) {
        double s = 0.0;
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j)
                s += rule.weights[i] * rule.weights[j] *
                     c.density(rule.nodes[i], rule.nodes[j]);
        // tail-dependent members converge slowly under Gauss-Legendre
        CHECK(s == doctest::Approx(1.0).epsilon(2e-3));
    }
}

TEST_CASE("cond_cdf equals the u-derivative of the cdf") {
    const double h = 1e-6;
    for (const auto& c : parametric_samples())
        for (double u = 0.15; u < 0.9; u += 0.2)
            for (double v = 0.15; v < 0.9; v += 0.2) {
                double num = (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2.0 * h);
                CHECK(c.cond_cdf(v, u) == doctest::Approx(num).epsilon(2e-5));
            }
}

TEST_CASE("conditional round trips on a 20x20 grid") {
    for (const auto& c : parametric_samples()) {
        for (int i = 1; i <= 20; ++i)
            for (int j = 1; j <= 20; ++j) {
                double u = i / 21.0, v = j / 21.0;
                double q = c.cond_cdf(v, u);
                if (q <= 1e-14 || q >= 1.0 - 1e-14) continue;
                CHECK(std::fabs(c.inv_cond_cdf(q, u) - v) < 1e-10);
            }
    }
}

TEST_CASE("BVN degenerates to a step near rho=1") {
    PairCopula c(CopulaFamily::BVN, 1.0 - 1e-12);
    CHECK(c.cond_cdf(0.4999, 0.5) < 1e-6);
    CHECK(c.cond_cdf(0.5001, 0.5) > 1.0 - 1e-6);
}

TEST_CASE("kendall tau values and monotonicity") {
    CHECK(PairCopula(CopulaFamily::BVN, 1.0 - 1e-15).kendall_tau() ==
          doctest::Approx(1.0).epsilon(1e-7));
    CHECK(PairCopula(CopulaFamily::Clayton, 2.0).kendall_tau() ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(PairCopula(CopulaFamily::Clayton90, 2.0).kendall_tau() ==
          doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(PairCopula(CopulaFamily::Frank, 1e-7).kendall_tau() ==
          doctest::Approx(1e-7 / 9.0).epsilon(1e-6));

    // tau is increasing in theta, except for the negative-quadrant rotations
    // where tau = -theta/(theta+2) decreases
    for (CopulaFamily f : {CopulaFamily::BVN, CopulaFamily::Frank,
                           CopulaFamily::Clayton, CopulaFamily::Clayton90}) {
        bool increasing = f != CopulaFamily::Clayton90;
        double prev = increasing ? -2.0 : 2.0;
        for (double step = 1; step <= 8; ++step) {
            double theta = f == CopulaFamily::BVN ? -0.9 + step * 0.2 : step * 0.7;
            double tau = PairCopula(f, theta).kendall_tau();
            CHECK((increasing ? tau > prev : tau < prev));
            prev = tau;
        }
    }
}

TEST_CASE("Frank tau vs Monte-Carlo Kendall tau") {
    // smaller than the acceptance-scale check, same oracle
    const int n = 200000;
    for (double theta : {-5.0, 1.0, 5.0}) {
        PairCopula c(CopulaFamily::Frank, theta);
        Rng rng(2024);
        std::vector<std::pair<double, double>> pts;
        pts.reserve(n);
        for (int i = 0; i < n; ++i) {
            double u = rng.uniform();
            pts.emplace_back(u, c.inv_cond_cdf(rng.uniform(), u));
        }
        double emp = testsupport::kendall_tau_empirical(std::move(pts));
        double tau = c.kendall_tau();
        double se = std::sqrt(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)));
        CHECK(std::fabs(emp - tau) < 3.0 * se);
    }
}

TEST_CASE("tau_to_theta round trips") {
    CHECK(tau_to_theta(CopulaFamily::Clayton, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(tau_to_theta(CopulaFamily::BVN, 0.5) ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    for (double tau : {-0.8, -0.3, 0.1, 0.45, 0.9})
        for (CopulaFamily f : {CopulaFamily::BVN, CopulaFamily::Frank}) {
            double theta = tau_to_theta(f, tau);
            CHECK(PairCopula(f, theta).kendall_tau() ==
                  doctest::Approx(tau).epsilon(1e-8));
        }
    CHECK_THROWS(tau_to_theta(CopulaFamily::Clayton, -0.5));
    CHECK(copula_from_tau(CopulaFamily::Frank, 0.0).family() ==
          CopulaFamily::Independence);
}

TEST_CASE("rotation consistency") {
    PairCopula base(CopulaFamily::Clayton, 2.0);
    PairCopula r180(CopulaFamily::Clayton180, 2.0);
    for (double u = 0.1; u < 1.0; u += 0.2)
        for (double v = 0.1; v < 1.0; v += 0.2)
            CHECK(r180.density(u, v) ==
                  doctest::Approx(base.density(1.0 - u, 1.0 - v)).epsilon(1e-10));
}

TEST_CASE("family names") {
    for (const char* name :
         {"independence", "bvn", "frank", "cln0", "cln90", "cln180", "cln270",
          "cln0-90", "cln0-270", "cln180-90", "cln180-270", "comonotonic",
          "countermonotonic"}) {
        FamilyChoice fc = parse_family(name);
        CHECK(family_name(fc) == name);
    }
    CHECK_THROWS(parse_family("gumbel"));
    CHECK(parse_family("cln0-90").branch(0.4) == CopulaFamily::Clayton);
    CHECK(parse_family("cln0-90").branch(-0.4) == CopulaFamily::Clayton90);
}
