#include "vinemeta/simstudy.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace vinemeta;

TEST_CASE("deterministic generators") {
    Rng a(123), b(123), c(124);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
    for (int i = 0; i < 1000; ++i) {
        double u = a.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    Rng s1 = Rng::substream(9, 1), s2 = Rng::substream(9, 2), s1b = Rng::substream(9, 1);
    CHECK(s1.next_u64() == s1b.next_u64());
    CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("gamma and multinomial draws") {
    Rng rng(7);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = gamma_draw(rng, 1.2, 0.01);
        CHECK(g > 0.0);
        sum += g;
        sq += g * g;
    }
    double mean = sum / n, var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(120.0).epsilon(0.02));       // shape/rate
    CHECK(var == doctest::Approx(12000.0).epsilon(0.05));      // shape/rate^2

    std::array<long long, 4> tot{};
    std::vector<double> p = {0.1, 0.2, 0.3, 0.4};
    for (int i = 0; i < 20000; ++i) {
        auto d = multinomial_draw(rng, 10, p);
        REQUIRE(d.size() == 4);
        CHECK(d[0] + d[1] + d[2] + d[3] == 10);
        for (int j = 0; j < 4; ++j) tot[j] += d[j];
    }
    for (int j = 0; j < 4; ++j)
        CHECK(tot[j] / 200000.0 == doctest::Approx(p[j]).epsilon(0.03));
}

TEST_CASE("study sizes") {
    Scenario sc = benchmark_scenario(MarginFamily::Normal);
    Rng rng(11);
    double sum = 0.0;
    int lo = 1 << 30;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        int s = simulate_study_size(rng, sc);
        lo = std::min(lo, s);
        sum += s;
    }
    CHECK(lo >= 30);
    CHECK(sum / n == doctest::Approx(150.0).epsilon(0.03));  // 30 + 1.2/0.01
}

TEST_CASE("replications are deterministic and well formed") {
    Scenario sc = benchmark_scenario(MarginFamily::Beta);
    Rng r1 = Rng::substream(5, 0), r2 = Rng::substream(5, 0), r3 = Rng::substream(5, 1);
    auto d1 = simulate_replication(sc, r1);
    auto d2 = simulate_replication(sc, r2);
    auto d3 = simulate_replication(sc, r3);
    REQUIRE(d1.size() == 11);
    bool same = true, diff = false;
    for (int i = 0; i < 11; ++i) {
        same = same && d1[i].diseased == d2[i].diseased &&
               d1[i].non_diseased == d2[i].non_diseased;
        diff = diff || d1[i].diseased != d3[i].diseased;
        CHECK(d1[i].n1() >= 30);
        CHECK(d1[i].n0() >= 30);
        CHECK_NOTHROW(d1[i].validate());
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("simulated frequencies match a degenerate truth") {
    // zero heterogeneity (tiny dispersion), independence edges: cell
    // frequencies are read straight off the mean triplets
    Scenario sc = benchmark_scenario(MarginFamily::Beta);
    sc.truth.disp1 = {1e-4, 1e-4, 1e-4};
    sc.truth.disp0 = {1e-4, 1e-4, 1e-4};
    for (auto& f : sc.truth.families) f = parse_family("independence");
    sc.truth.taus = {0, 0, 0, 0, 0};
    sc.n_studies = 400;
    Rng rng(17);
    auto data = simulate_replication(sc, rng);
    double y111 = 0.0, n1 = 0.0, y110 = 0.0, n0 = 0.0;
    for (const auto& st : data) {
        y111 += st.diseased[2];
        n1 += st.n1();
        y110 += st.non_diseased[2];
        n0 += st.n0();
    }
    CHECK(y111 / n1 == doctest::Approx(sc.truth.pi1.p11).epsilon(0.05));
    CHECK(y110 / n0 == doctest::Approx(sc.truth.pi0.p11).epsilon(0.10));
}

TEST_CASE("summary aggregation identities") {
    // tiny correctly-specified run; checks plumbing, not statistics
    Scenario sc = benchmark_scenario(MarginFamily::Normal);
    sc.replications = 4;
    sc.n_studies = 8;
    sc.seed = 3;
    FitOptions opt;
    opt.nq = 5;
    opt.max_iter = 120;
    SimSummary s = run_study(sc, MarginFamily::Normal, parse_family("bvn"), opt, 4);
    CHECK(s.replications == 4);
    REQUIRE(s.converged >= 2);
    REQUIRE(!s.rows.empty());
    std::map<std::string, SimRow> by_name;
    for (const auto& r : s.rows) by_name[r.name] = r;
    REQUIRE(by_name.count("pi111") == 1);
    REQUIRE(by_name.count("sigma101") == 1);
    REQUIRE(by_name.count("tau101_011") == 1);
    REQUIRE(by_name.count("pi1_1") == 1);
    CHECK(by_name["pi111"].truth == doctest::Approx(sc.truth.pi1.p11));
    const int R = s.converged;
    for (const auto& r : s.rows) {
        if (!std::isfinite(r.sd)) continue;
        // RMSE^2 = bias^2 + SD^2 (R-1)/R, all on the x100 scale
        double want = std::sqrt(r.bias * r.bias +
                                r.sd * r.sd * (R - 1.0) / R);
        CHECK(r.rmse == doctest::Approx(want).epsilon(1e-8));
    }

    // a single replication yields no SD
    Scenario one = sc;
    one.replications = 1;
    SimSummary s1 = run_study(one, MarginFamily::Normal, parse_family("bvn"), opt, 2);
    if (s1.converged == 1)
        for (const auto& r : s1.rows) CHECK(!std::isfinite(r.sd));
}
