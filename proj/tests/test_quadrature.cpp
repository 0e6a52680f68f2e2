#include "vinemeta/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace vinemeta;

TEST_CASE("degenerate rules") {
    auto r1 = gauss_legendre(1);
    CHECK(r1.nodes == std::vector<double>{0.5});
    CHECK(r1.weights == std::vector<double>{1.0});

    auto r2 = gauss_legendre(2);
    double off = 1.0 / (2.0 * std::sqrt(3.0));
    CHECK(r2.nodes[0] == doctest::Approx(0.5 - off).epsilon(1e-14));
    CHECK(r2.nodes[1] == doctest::Approx(0.5 + off).epsilon(1e-14));
    CHECK(r2.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r2.weights[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("argument range") {
    CHECK_THROWS(gauss_legendre(0));
    CHECK_THROWS(gauss_legendre(101));
    CHECK_NOTHROW(gauss_legendre(100));
}

TEST_CASE("polynomial exactness up to degree 2n-1") {
    for (int n : {1, 2, 3, 5, 8, 15, 30}) {
        auto r = gauss_legendre(n);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += r.weights[i] * std::pow(r.nodes[i], deg);
            CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("n=15 integrates x^29 exactly") {
    auto r = gauss_legendre(15);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += r.weights[i] * std::pow(r.nodes[i], 29);
    CHECK(std::fabs(s - 1.0 / 30.0) < 1e-12);
}

TEST_CASE("symmetry and normalization") {
    for (int n : {2, 7, 15, 40, 100}) {
        auto r = gauss_legendre(n);
        double wsum = 0.0;
        for (int i = 0; i < n; ++i) {
            wsum += r.weights[i];
            CHECK(r.nodes[i] + r.nodes[n - 1 - i] == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(r.weights[i] == doctest::Approx(r.weights[n - 1 - i]).epsilon(1e-13));
            CHECK(r.weights[i] > 0.0);
            if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
        }
        CHECK(std::fabs(wsum - 1.0) < 1e-14);
    }
}
