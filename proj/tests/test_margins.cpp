#include "vinemeta/margins.hpp"
#include "vinemeta/normal.hpp"
#include "vinemeta/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace vinemeta;

TEST_CASE("mlogit and its inverse") {
    auto x = mlogit({0.25, 0.25, 0.25});
    CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(x[2] == doctest::Approx(0.0).epsilon(1e-14));

    auto y = mlogit({0.037, 0.093, 0.295});
    CHECK(y[0] == doctest::Approx(std::log(0.037 / 0.575)).epsilon(1e-13));
    CHECK(y[1] == doctest::Approx(std::log(0.093 / 0.575)).epsilon(1e-13));
    CHECK(y[2] == doctest::Approx(std::log(0.295 / 0.575)).epsilon(1e-13));

    ProbTriplet p = mlogit_inv({0.0, 0.0, 0.0});
    CHECK(p.p10 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(mlogit_inv({800.0, 0.0, 0.0}).p10 == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.uniform(), b = rng.uniform(), c = rng.uniform(),
               d = rng.uniform();
        double s = a + b + c + d;
        ProbTriplet t{a / s, b / s, c / s};
        ProbTriplet back = mlogit_inv(mlogit(t));
        CHECK(std::fabs(back.p10 - t.p10) < 1e-12);
        CHECK(std::fabs(back.p01 - t.p01) < 1e-12);
        CHECK(std::fabs(back.p11 - t.p11) < 1e-12);
    }
    CHECK_THROWS(mlogit({0.5, 0.5, 0.2}));
}

TEST_CASE("conditional-proportion transform") {
    auto m = conditional_from_joint({0.25, 0.25, 0.25});
    CHECK(m[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(m[2] == doctest::Approx(0.5).epsilon(1e-14));

    auto mb = conditional_from_joint({0.091, 0.086, 0.292});
    CHECK(mb[0] == doctest::Approx(0.091).epsilon(1e-14));
    CHECK(mb[1] == doctest::Approx(0.086 / 0.909).epsilon(1e-13));
    CHECK(mb[2] ==
          doctest::Approx(0.292 / ((1.0 - 0.086 / 0.909) * 0.909)).epsilon(1e-13));

    ProbTriplet p = joint_from_conditional({0.25, 1.0 / 3.0, 0.5});
    CHECK(p.p10 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(p.p01 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(p.p11 == doctest::Approx(0.25).epsilon(1e-14));

    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        std::array<double, 3> x = {rng.uniform(), rng.uniform(), rng.uniform()};
        ProbTriplet j = joint_from_conditional(x);
        CHECK(j.valid());
        auto back = conditional_from_joint(j);
        for (int k = 0; k < 3; ++k) CHECK(std::fabs(back[k] - x[k]) < 1e-13);
    }
}

TEST_CASE("beta moments under the mean-dispersion parameterization") {
    BetaMargin m{0.3, 0.1};
    double a = m.alpha(), b = m.beta();
    CHECK(a / (a + b) == doctest::Approx(0.3).epsilon(1e-14));
    double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
    CHECK(var == doctest::Approx(0.1 * 0.3 * 0.7).epsilon(1e-12));
}

TEST_CASE("margin quantiles") {
    CHECK(normal_quantile({0.0, 1.0}, 0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(normal_quantile({2.0, 3.0}, 0.975) ==
          doctest::Approx(2.0 + 3.0 * 1.959963984540054).epsilon(1e-9));

    // tiny dispersion concentrates at the mean
    CHECK(beta_quantile({0.5, 1e-6}, 0.01) == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(beta_quantile({0.5, 1e-6}, 0.99) == doctest::Approx(0.5).epsilon(1e-2));

    // strictly increasing + cdf round trip
    BetaMargin m{0.3, 0.1};
    double prev = 0.0;
    for (double u = 0.02; u < 1.0; u += 0.02) {
        double x = beta_quantile(m, u);
        CHECK(x > prev);
        CHECK(beta_cdf(m, x) == doctest::Approx(u).epsilon(1e-9));
        prev = x;
    }

    // Monte-Carlo mean of quantile-transformed uniforms
    Rng rng(5);
    const int n = 1000000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += beta_quantile(m, rng.uniform());
    double se = std::sqrt(0.1 * 0.3 * 0.7 / n);
    CHECK(std::fabs(sum / n - 0.3) < 3.0 * se);
}

TEST_CASE("beta quantile spline accuracy") {
    for (auto m : {BetaMargin{0.3, 0.1}, BetaMargin{0.034, 0.01},
                   BetaMargin{0.292, 0.186}, BetaMargin{0.9, 0.016}}) {
        BetaQuantileGrid g(m);
        CHECK(g.probe_error() < 1e-7);
        CHECK(g.from_u(0.5) == doctest::Approx(beta_quantile(m, 0.5)).epsilon(1e-9));
        // exact fallback outside the tabulated range
        CHECK(g.from_z(-9.5) ==
              doctest::Approx(beta_quantile(m, norm_cdf(-9.5))).epsilon(1e-10));
    }
}
