#include "vinemeta/simstudy.hpp"

#include "vinemeta/parallel.hpp"

#include <cmath>
#include <limits>

namespace vinemeta {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ModelParams normal_truth() {
    ModelParams p = default_params(MarginFamily::Normal, parse_family("bvn"));
    p.pi1 = {0.037, 0.093, 0.295};
    p.pi0 = {0.017, 0.049, 0.030};
    p.disp1 = {1.699, 0.543, 0.585};
    p.disp0 = {0.929, 0.490, 0.570};
    p.taus = {-0.525, 0.558, 0.185, 0.022, 0.576};
    return p;
}

ModelParams beta_truth() {
    ModelParams p = default_params(MarginFamily::Beta, parse_family("bvn"));
    p.pi1 = {0.091, 0.086, 0.292};
    p.pi0 = {0.024, 0.054, 0.034};
    p.disp1 = {0.186, 0.016, 0.066};
    p.disp0 = {0.015, 0.011, 0.010};
    p.taus = {-0.525, 0.300, 0.197, -0.029, 0.544};
    return p;
}

}  // namespace

Scenario benchmark_scenario(MarginFamily margins) {
    Scenario sc;
    sc.truth = margins == MarginFamily::Normal ? normal_truth() : beta_truth();
    return sc;
}

int simulate_study_size(Rng& rng, const Scenario& sc) {
    double n = sc.size_lag + gamma_draw(rng, sc.size_shape, sc.size_rate);
    return static_cast<int>(std::lround(n));
}

std::vector<StudyTable> simulate_replication(const Scenario& sc, Rng& rng) {
    const ModelParams& tr = sc.truth;
    const VineSpec spec = tr.vine();
    const auto pm = position_margins(tr);
    const bool normal = tr.margins == MarginFamily::Normal;
    std::vector<StudyTable> out;
    out.reserve(sc.n_studies);
    for (int i = 0; i < sc.n_studies; ++i) {
        int n1 = simulate_study_size(rng, sc);
        int n0 = simulate_study_size(rng, sc);
        std::array<double, 6> u = simulate_one(spec, rng);
        StudyTable st;
        st.id = std::to_string(i + 1);
        for (int t : {1, 0}) {
            std::array<int, 3> pos{}, cell{};
            int m = 0;
            for (int p = 0; p < 6; ++p) {
                if (label_arm(tr.order[p]) != t) continue;
                pos[m] = p;
                cell[m] = label_cell(tr.order[p]);
                ++m;
            }
            ProbTriplet cp;  // cell probabilities of this study's arm
            if (normal) {
                std::array<double, 3> x{};
                for (int j = 0; j < 3; ++j)
                    x[cell[j]] = normal_quantile(pm[pos[j]].normal, u[pos[j]]);
                cp = mlogit_inv(x);
            } else {
                std::array<double, 3> cond{};
                for (int j = 0; j < 3; ++j)
                    cond[j] = beta_quantile(pm[pos[j]].beta, u[pos[j]]);
                ProbTriplet seq = joint_from_conditional(cond);
                std::array<double, 3> by_cell{};
                for (int j = 0; j < 3; ++j) by_cell[cell[j]] = seq[j];
                cp = {by_cell[0], by_cell[1], by_cell[2]};
            }
            std::vector<int> y = multinomial_draw(
                rng, t == 1 ? n1 : n0,
                {cp.p10, cp.p01, cp.p11, cp.remainder()});
            auto& arr = t == 1 ? st.diseased : st.non_diseased;
            for (int c = 0; c < 4; ++c) arr[c] = y[c];
        }
        out.push_back(std::move(st));
    }
    return out;
}

SimSummary run_study(const Scenario& sc, MarginFamily fit_margins,
                     const FamilyChoice& fit_family, const FitOptions& fit_opt,
                     int threads) {
    const ModelParams& tr = sc.truth;
    const bool same_margins = fit_margins == tr.margins;
    const std::string dp = fit_margins == MarginFamily::Normal ? "sigma" : "gamma";

    SimSummary sum;
    std::vector<std::string> names;
    std::vector<double> truths;
    for (Label l : kCanonicalLabels) {
        names.push_back("pi" + label_str(l));
        truths.push_back(tr.pi(label_arm(l))[label_cell(l)]);
    }
    if (same_margins)
        for (Label l : kCanonicalLabels) {
            names.push_back(dp + label_str(l));
            truths.push_back(tr.disp(label_arm(l))[label_cell(l)]);
        }
    for (int k = 0; k < 5; ++k) {
        names.push_back("tau" + label_str(tr.order[k]) + "_" +
                        label_str(tr.order[k + 1]));
        truths.push_back(tr.taus[k]);
    }
    const std::array<std::string, 4> dnames = {"pi1_1", "pi_11", "pi1_0", "pi_10"};
    const auto dtruth = derived_accuracy(tr);
    for (int j = 0; j < 4; ++j) {
        names.push_back(dnames[j]);
        truths.push_back(dtruth[j]);
    }
    const std::size_t np = names.size();

    auto extract = [&](const FitResult& r, std::vector<double>& est,
                       std::vector<double>& se) {
        const ModelParams& p = r.params;
        std::size_t i = 0;
        for (Label l : kCanonicalLabels) {
            int t = label_arm(l), c = label_cell(l);
            est[i] = p.pi(t)[c];
            se[i] = t == 1 ? r.se_pi1[c] : r.se_pi0[c];
            ++i;
        }
        if (same_margins)
            for (Label l : kCanonicalLabels) {
                int t = label_arm(l), c = label_cell(l);
                est[i] = p.disp(t)[c];
                se[i] = t == 1 ? r.se_disp1[c] : r.se_disp0[c];
                ++i;
            }
        for (int k = 0; k < 5; ++k, ++i) {
            est[i] = p.taus[k];
            se[i] = r.se_tau[k];
        }
        for (int j = 0; j < 4; ++j, ++i) {
            est[i] = r.derived[j];
            se[i] = r.se_derived[j];
        }
    };

    const int R = sc.replications;
    std::vector<std::vector<double>> est(R), se(R);
    std::vector<char> keep(R, 0);
    FitOptions single = fit_opt;
    single.threads = 1;
    parallel_for(R, threads, [&](std::size_t r) {
        Rng rng = Rng::substream(sc.seed, r);
        auto data = simulate_replication(sc, rng);
        FitResult res;
        try {
            res = fit(data, fit_margins, fit_family, tr.order, single);
        } catch (const std::exception&) {
            return;
        }
        if (!res.converged) return;
        est[r].assign(np, kNaN);
        se[r].assign(np, kNaN);
        extract(res, est[r], se[r]);
        keep[r] = 1;
    });

    sum.replications = R;
    for (int r = 0; r < R; ++r) sum.converged += keep[r];
    const int n = sum.converged;
    sum.rows.resize(np);
    bool any_se_missing = false;
    for (std::size_t i = 0; i < np; ++i) {
        SimRow& row = sum.rows[i];
        row.name = names[i];
        row.truth = truths[i];
        if (n == 0) {
            row.bias = row.sd = row.rmse = row.sqrt_vbar = kNaN;
            continue;
        }
        double mean = 0.0, mse = 0.0, vsum = 0.0;
        int nv = 0;
        for (int r = 0; r < R; ++r) {
            if (!keep[r]) continue;
            mean += est[r][i];
            double e = est[r][i] - truths[i];
            mse += e * e;
            if (std::isfinite(se[r][i])) {
                vsum += se[r][i] * se[r][i];
                ++nv;
            }
        }
        mean /= n;
        mse /= n;
        double var = 0.0;
        for (int r = 0; r < R; ++r) {
            if (!keep[r]) continue;
            var += (est[r][i] - mean) * (est[r][i] - mean);
        }
        row.bias = 100.0 * (mean - truths[i]);
        row.sd = n > 1 ? 100.0 * std::sqrt(var / (n - 1)) : kNaN;
        row.rmse = 100.0 * std::sqrt(mse);
        row.sqrt_vbar = nv > 0 ? 100.0 * std::sqrt(vsum / nv) : kNaN;
        if (nv < n) any_se_missing = true;
    }
    if (any_se_missing) {
        // count converged fits lacking at least one variance
        for (int r = 0; r < R; ++r) {
            if (!keep[r]) continue;
            for (std::size_t i = 0; i < np; ++i)
                if (!std::isfinite(se[r][i])) {
                    ++sum.se_missing;
                    break;
                }
        }
    }
    return sum;
}

}  // namespace vinemeta
